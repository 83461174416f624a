// Wire shapes published by the feeding-robot service.  The console never
// invents state: everything below arrives verbatim as JSON from the HTTP
// endpoints or the numbered SSE event stream.

export type CueKind =
  | 'beep'
  | 'got_it_processing'
  | 'scooping_now'
  | 'scraping_now'
  | 'ready_for_another'
  | 'error_message';

export interface CuePayload {
  kind: CueKind;
  text?: string;
}

// One executor trace event.  `kind` selects which extra fields are present;
// they are flattened into the payload object by the server.
export interface TracePayload {
  t: number;
  kind: string; // segment_start | segment_end | scoop_completed | scrape_performed
  //              | bite_delivered | wait_started | cue_emitted | halted
  //              | paused_at | resumed_at
  bowl?: number;
  units?: number;
  units_moved?: number;
  deep?: boolean;
  speed?: number;
  accel?: number;
  center_after?: number;
  edge_after?: number;
  spoon_load?: number;
  seconds?: number;
  duration?: number;
  step_index?: number;
  segment_index?: number;
  action?: string;
  target?: string;
  cue?: string;
  reason?: string;
  cause?: string;
}

export interface BowlSnapshot {
  label: string;
  center_units: number;
  edge_units: number;
}

export interface LastCommand {
  command: string;
  ok: boolean;
  completion: string | null;
  warnings: string[];
  plan: PlanStep[] | null;
  error: string | null;
  cues: CuePayload[];
}

export interface PlanStep {
  kind: string; // scoop | scrape_then_scoop | move_to_mouth | wait | control
  bowl?: number;
  deep?: boolean;
  speed?: number;
  accel?: number;
  seconds?: number;
  action?: string;
}

export interface StatePayload {
  status: string; // idle | running | paused | halted | stopped
  pose: number[];
  spoon_load: number;
  program_counter: number;
  segment_index: number;
  bowls: BowlSnapshot[];
  delivered: number[];
  phase?: string; // awaiting_wake | capturing_command | processing | executing
  prompt_version?: string;
  variables?: { speed: number; accel: number; deep_scoop: boolean };
  last_command?: LastCommand;
  error?: string; // present only on internal-failure pushes
  events?: { next_seq: number; first_retained: number };
}

export interface WireEvent {
  seq: number;
  t: number;
  type: 'cue' | 'trace' | 'state';
  payload: CuePayload | TracePayload | StatePayload;
}

export interface SessionInfo {
  session_id: string;
  prompt_version: string;
  adapter: string;
  wake_phrases: string[];
}

export interface GradeVerdict {
  task: string;
  passed: boolean;
  reason: string;
  command: string;
}

export interface ServiceSchema {
  version: string;
  functions: Record<string, { arity: number; bowl_range: [number, number] | null }>;
  variables: string[];
  levels: { max_level: number; speed_per_level: number; accel_per_level: number };
  limits: Record<string, number>;
  cues: string[];
  tasks: string[];
}

export const MOTION_TRACE_KINDS = new Set([
  'segment_start',
  'segment_end',
  'scoop_completed',
  'scrape_performed',
  'bite_delivered',
]);

export function isCueEvent(ev: WireEvent): ev is WireEvent & { payload: CuePayload } {
  return ev.type === 'cue';
}

export function isTraceEvent(ev: WireEvent): ev is WireEvent & { payload: TracePayload } {
  return ev.type === 'trace';
}

export function isStateEvent(ev: WireEvent): ev is WireEvent & { payload: StatePayload } {
  return ev.type === 'state';
}
