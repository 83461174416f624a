// Browser bootstrap.  Configuration rides the URL query:
//   ?base=http://127.0.0.1:8008   service origin (default: same origin)
//   &session=abc123               attach to an existing session
//   &token=secret                 bearer token, when the server requires one
//   &time_scale=0.05              create a scaled wall-clock session
//
// All mutation goes through endpoint calls; all display state is the pure
// fold in viewmodel.ts over the numbered event stream.

import { ConsoleApi } from './api.js';
import { auditStream, type AuditReport } from './audit.js';
import { EventStream, fetchEvents } from './sse.js';
import {
  acknowledgeHalt,
  applyWire,
  commandBoxEnabled,
  dismissToast,
  initialViewModel,
  recordAttempt,
  selectTask,
  setStreamStatus,
  setTasks,
  type ConsoleViewModel,
} from './viewmodel.js';
import {
  renderArm,
  renderAudit,
  renderBowls,
  renderCommandBox,
  renderCueLog,
  renderPhaseBadge,
  renderPlanInspector,
  renderReconnectBanner,
  renderTaskPanel,
  renderToasts,
} from './render.js';
import type { WireEvent } from './types.js';

interface SpeechRecognitionLike {
  lang: string;
  onresult: ((ev: { results: ArrayLike<ArrayLike<{ transcript: string }>> }) => void) | null;
  onend: (() => void) | null;
  start(): void;
}

const params = new URLSearchParams(window.location.search);
const base = params.get('base') ?? window.location.origin;
const token = params.get('token') ?? undefined;
const api = new ConsoleApi(base, token);

let vm: ConsoleViewModel = initialViewModel();
let audit: AuditReport | null = null;
let sessionId = params.get('session') ?? '';
let stream: EventStream | null = null;
let gradeInFlight = false;

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el;
}

function paint(): void {
  $('banner-slot').innerHTML = renderReconnectBanner(vm);
  $('phase-slot').innerHTML = renderPhaseBadge(vm);
  $('arm-slot').innerHTML = renderArm(vm);
  $('bowls-slot').innerHTML = renderBowls(vm);
  $('cues-slot').innerHTML = renderCueLog(vm);
  $('inspector-slot').innerHTML = renderPlanInspector(vm);
  $('task-slot').innerHTML = renderTaskPanel(vm);
  $('toast-slot').innerHTML = renderToasts(vm);
  $('audit-slot').innerHTML = renderAudit(audit);

  // command box keeps focus/typing state, so only rebuild when its
  // enablement changed
  const box = $('command-slot');
  const wasEnabled = box.dataset['enabled'] === 'true';
  const nowEnabled = commandBoxEnabled(vm);
  if (box.childElementCount === 0 || wasEnabled !== nowEnabled) {
    box.innerHTML = renderCommandBox(vm);
    box.dataset['enabled'] = String(nowEnabled);
    bindCommandBox();
  }
  const log = document.querySelector('.cue-log');
  if (log) log.scrollTop = log.scrollHeight;
}

function onWire(ev: WireEvent): void {
  vm = applyWire(vm, ev);
  if (ev.type === 'cue') {
    const kind = (ev.payload as { kind: string }).kind;
    if (kind === 'ready_for_another' || kind === 'error_message') void onCycleFinished();
  }
  paint();
}

// when a command cycle ends: refresh the self-audit from the raw stream and,
// if a task is selected, ask the server's oracle for a verdict
async function onCycleFinished(): Promise<void> {
  try {
    const events = await fetchEvents(api, sessionId, 0);
    audit = auditStream(events);
  } catch {
    // audit refresh is best-effort; the next cycle retries
  }
  if (vm.task.selected && !vm.task.failed && !gradeInFlight && vm.lastCommand) {
    gradeInFlight = true;
    try {
      const verdict = await api.grade(sessionId, vm.task.selected);
      vm = recordAttempt(vm, verdict);
    } catch {
      // e.g. 409 before any command; leave the panel untouched
    } finally {
      gradeInFlight = false;
    }
  }
  paint();
}

function bindCommandBox(): void {
  const input = document.getElementById('command-text') as HTMLInputElement | null;
  const send = document.getElementById('send-command');
  const submit = () => {
    if (!input || !input.value.trim()) return;
    const wake = (document.getElementById('wake-toggle') as HTMLInputElement | null)?.checked ?? false;
    // wake toggle on = client prefixes nothing and asks the server to do
    // wake detection on the raw transcript; off = text is the command
    const text = wake ? `Hey Obi, ${input.value}` : input.value;
    void api.command(sessionId, text, !wake).catch((err) => {
      vm = { ...vm, toasts: [...vm.toasts, String(err)] };
      paint();
    });
    input.value = '';
  };
  send?.addEventListener('click', submit);
  input?.addEventListener('keydown', (e) => {
    if ((e as KeyboardEvent).key === 'Enter') submit();
  });
  document.getElementById('ack-halt')?.addEventListener('click', () => {
    vm = acknowledgeHalt(vm);
    paint();
  });
}

function bindStatic(): void {
  $('task-panel').addEventListener('change', (e) => {
    const sel = e.target as HTMLSelectElement;
    if (sel.id === 'task-select') {
      vm = selectTask(vm, sel.value || null);
      paint();
    }
  });
  for (const [id, action] of [
    ['btn-stop', 'stop'],
    ['btn-pause', 'pause'],
    ['btn-resume', 'resume'],
  ] as const) {
    $('command-panel').addEventListener('click', (e) => {
      if ((e.target as HTMLElement).id === id) {
        void api.control(sessionId, action).catch(() => undefined);
      }
    });
  }
  $('toast-panel').addEventListener('click', (e) => {
    const idx = (e.target as HTMLElement).dataset['toastClose'];
    if (idx !== undefined) {
      vm = dismissToast(vm, Number(idx));
      paint();
    }
  });
  const mic = document.getElementById('mic-toggle');
  const Recognition = (window as unknown as Record<string, unknown>)['webkitSpeechRecognition'] as
    | (new () => SpeechRecognitionLike)
    | undefined;
  if (mic && Recognition) {
    mic.addEventListener('click', () => {
      const rec = new Recognition();
      rec.lang = 'en-US';
      rec.onresult = (ev) => {
        const transcript = ev.results[0]?.[0]?.transcript ?? '';
        // speech capture still submits text, through the same transcript path
        if (transcript) void api.command(sessionId, transcript, false);
      };
      rec.start();
    });
  } else if (mic) {
    mic.setAttribute('disabled', 'true');
    mic.title = 'speech capture not available in this browser';
  }
}

async function boot(): Promise<void> {
  bindStatic();
  paint();
  const schema = await api.schema();
  vm = setTasks(vm, schema.tasks);
  if (!sessionId) {
    const timeScale = params.get('time_scale');
    const info = await api.createSession(timeScale ? { time_scale: Number(timeScale) } : {});
    sessionId = info.session_id;
    const url = new URL(window.location.href);
    url.searchParams.set('session', sessionId);
    window.history.replaceState(null, '', url.toString());
  }
  $('session-slot').textContent = sessionId;
  stream = new EventStream(api, sessionId, {
    from: 0,
    onEvent: onWire,
    onStatus: (s) => {
      vm = setStreamStatus(vm, s);
      paint();
    },
  });
  stream.start();
  paint();
}

void boot().catch((err) => {
  document.body.innerHTML = `<pre class="boot-error">cannot reach the service at ${base}\n${String(err)}</pre>`;
});
