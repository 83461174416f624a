// Event-sourced view model: a pure fold over the ordered wire events plus
// endpoint responses.  Nothing in here simulates the robot — bowls, pose,
// and counters come straight from server snapshots and trace events; the
// only client-side state is presentation bookkeeping (cue log, toasts,
// task-panel attempt tally, halt acknowledgement).

import type {
  BowlSnapshot,
  CuePayload,
  GradeVerdict,
  LastCommand,
  StatePayload,
  TracePayload,
  WireEvent,
} from './types.js';
import { isCueEvent, isStateEvent, isTraceEvent } from './types.js';

export interface CueLogEntry {
  seq: number;
  t: number;
  kind: string;
  text?: string;
}

export interface TaskPanel {
  tasks: string[]; // from /schema
  selected: string | null;
  attemptsUsed: number;
  attemptsAllowed: number;
  verdict: string | null; // e.g. "pass at attempt 1"
  failed: boolean; // attempts exhausted without a pass
}

export interface ConsoleViewModel {
  lastSeq: number; // highest applied seq, -1 before the first event
  streamStatus: string; // connecting | live | reconnecting | gone | stopped
  phase: string; // awaiting_wake | capturing_command | processing | executing
  status: string; // idle | running | paused | halted | stopped
  processing: boolean; // spinner between "got it" and the terminal cue
  halted: boolean;
  haltAcknowledged: boolean;
  haltReason: string | null;
  haltCause: string | null;
  pose: number[];
  spoonLoad: number;
  bowls: BowlSnapshot[];
  delivered: number[];
  biteCount: number;
  lastBiteAt: number | null; // sim-time of the latest bite; restarts the interval timer
  lastBiteInterval: number | null; // seconds between the two most recent bites
  cueLog: CueLogEntry[];
  toasts: string[]; // spoken error messages, newest last
  lastCommand: LastCommand | null; // plan inspector content
  variables: { speed: number; accel: number; deep_scoop: boolean } | null;
  task: TaskPanel;
}

export const ATTEMPTS_ALLOWED = 3;

export function initialViewModel(): ConsoleViewModel {
  return {
    lastSeq: -1,
    streamStatus: 'connecting',
    phase: 'awaiting_wake',
    status: 'idle',
    processing: false,
    halted: false,
    haltAcknowledged: false,
    haltReason: null,
    haltCause: null,
    pose: [],
    spoonLoad: 0,
    bowls: [],
    delivered: [],
    biteCount: 0,
    lastBiteAt: null,
    lastBiteInterval: null,
    cueLog: [],
    toasts: [],
    lastCommand: null,
    variables: null,
    task: {
      tasks: [],
      selected: null,
      attemptsUsed: 0,
      attemptsAllowed: ATTEMPTS_ALLOWED,
      verdict: null,
      failed: false,
    },
  };
}

export function applyWire(vm: ConsoleViewModel, ev: WireEvent): ConsoleViewModel {
  const next = { ...vm, lastSeq: Math.max(vm.lastSeq, ev.seq) };
  if (isCueEvent(ev)) return applyCue(next, ev.seq, ev.t, ev.payload);
  if (isTraceEvent(ev)) return applyTrace(next, ev.payload);
  if (isStateEvent(ev)) return applySnapshot(next, ev.payload);
  return next;
}

export function applyAll(vm: ConsoleViewModel, events: Iterable<WireEvent>): ConsoleViewModel {
  let out = vm;
  for (const ev of events) out = applyWire(out, ev);
  return out;
}

function applyCue(vm: ConsoleViewModel, seq: number, t: number, cue: CuePayload): ConsoleViewModel {
  const entry: CueLogEntry = { seq, t, kind: cue.kind };
  if (cue.text !== undefined) entry.text = cue.text;
  vm.cueLog = [...vm.cueLog, entry];
  if (cue.kind === 'got_it_processing') vm.processing = true;
  if (cue.kind === 'ready_for_another' || cue.kind === 'error_message') vm.processing = false;
  if (cue.kind === 'error_message') vm.toasts = [...vm.toasts, cue.text ?? 'command failed'];
  return vm;
}

function applyTrace(vm: ConsoleViewModel, ev: TracePayload): ConsoleViewModel {
  switch (ev.kind) {
    case 'bite_delivered':
      vm.lastBiteInterval = vm.lastBiteAt === null ? null : ev.t - vm.lastBiteAt;
      vm.lastBiteAt = ev.t; // the on-screen interval timer restarts here
      vm.biteCount += 1;
      break;
    case 'halted':
      vm.halted = true;
      vm.haltAcknowledged = false;
      vm.haltReason = ev.reason ?? null;
      vm.haltCause = ev.cause ?? null;
      break;
    case 'cue_emitted':
      // executor-side cues also arrive as session cues; nothing extra to do
      break;
    default:
      break;
  }
  return vm;
}

function applySnapshot(vm: ConsoleViewModel, snap: StatePayload): ConsoleViewModel {
  if (snap.error !== undefined) {
    vm.toasts = [...vm.toasts, snap.error];
    return vm;
  }
  vm.status = snap.status;
  vm.pose = snap.pose;
  vm.spoonLoad = snap.spoon_load;
  vm.bowls = snap.bowls;
  vm.delivered = snap.delivered;
  if (snap.phase !== undefined) vm.phase = snap.phase;
  if (snap.variables !== undefined) vm.variables = snap.variables;
  if (snap.last_command !== undefined) vm.lastCommand = snap.last_command;
  // a later run means the halt was cleared server-side
  if (vm.halted && (snap.status === 'running' || snap.status === 'idle')) {
    vm.halted = false;
    vm.haltReason = null;
    vm.haltCause = null;
  }
  return vm;
}

// -- presentation-only transitions -----------------------------------------

export function setStreamStatus(vm: ConsoleViewModel, status: string): ConsoleViewModel {
  return { ...vm, streamStatus: status };
}

export function acknowledgeHalt(vm: ConsoleViewModel): ConsoleViewModel {
  return { ...vm, haltAcknowledged: true };
}

export function setTasks(vm: ConsoleViewModel, tasks: string[]): ConsoleViewModel {
  return { ...vm, task: { ...vm.task, tasks } };
}

export function selectTask(vm: ConsoleViewModel, task: string | null): ConsoleViewModel {
  return {
    ...vm,
    task: {
      ...vm.task,
      selected: task,
      attemptsUsed: 0,
      verdict: null,
      failed: false,
    },
  };
}

// Record one graded attempt at the selected task (called after each command
// cycle completes while a task is active).  Three failures mark the task
// failed, mirroring the replay harness's attempt cap.
export function recordAttempt(vm: ConsoleViewModel, verdict: GradeVerdict): ConsoleViewModel {
  const used = vm.task.attemptsUsed + 1;
  const text = verdict.passed
    ? `pass at attempt ${used}`
    : `fail at attempt ${used}: ${verdict.reason}`;
  return {
    ...vm,
    task: {
      ...vm.task,
      attemptsUsed: used,
      verdict: text,
      failed: !verdict.passed && used >= vm.task.attemptsAllowed,
    },
  };
}

export function dismissToast(vm: ConsoleViewModel, index: number): ConsoleViewModel {
  return { ...vm, toasts: vm.toasts.filter((_, i) => i !== index) };
}

// -- derived predicates ------------------------------------------------------

export function commandBoxEnabled(vm: ConsoleViewModel): boolean {
  if (vm.processing) return false;
  if (vm.halted && !vm.haltAcknowledged) return false; // disabled until reset
  return true;
}

export function interruptsEnabled(vm: ConsoleViewModel): boolean {
  return vm.status === 'running' || vm.status === 'paused';
}

export function attemptsRemaining(vm: ConsoleViewModel): number {
  return Math.max(0, vm.task.attemptsAllowed - vm.task.attemptsUsed);
}
