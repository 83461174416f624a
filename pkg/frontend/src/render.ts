// Pure renderers: view model in, HTML string out.  main.ts owns the DOM;
// everything here is testable without a browser.

import type { AuditReport } from './audit.js';
import type { ConsoleViewModel } from './viewmodel.js';
import { attemptsRemaining, commandBoxEnabled, interruptsEnabled } from './viewmodel.js';

export function esc(x: string): string {
  return x.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;').replace(/"/g, '&quot;');
}

const PHASE_LABELS: Record<string, string> = {
  awaiting_wake: 'Waiting for "Hey Obi"',
  capturing_command: 'Listening for a command',
  processing: 'Processing',
  executing: 'Executing',
};

const CUE_LABELS: Record<string, string> = {
  beep: '♪ beep',
  got_it_processing: 'Got it, processing',
  scooping_now: 'Scooping now',
  scraping_now: 'Scraping now',
  ready_for_another: 'Ready for another command',
  error_message: 'Error',
};

export function renderPhaseBadge(vm: ConsoleViewModel): string {
  if (vm.halted) {
    const reason = vm.haltCause === 'control' ? 'stopped by user' : (vm.haltReason ?? 'stopped');
    return `<span class="badge badge-halted">Halted — ${esc(reason)}</span>`;
  }
  const label = PHASE_LABELS[vm.phase] ?? vm.phase;
  const cls = vm.status === 'running' ? 'badge-running' : vm.status === 'paused' ? 'badge-paused' : 'badge-idle';
  return `<span class="badge ${cls}">${esc(label)}</span> <span class="status-word">${esc(vm.status)}</span>`;
}

export function renderReconnectBanner(vm: ConsoleViewModel): string {
  if (vm.streamStatus === 'live' || vm.streamStatus === 'stopped') return '';
  const text =
    vm.streamStatus === 'gone'
      ? 'Event history was evicted — resynchronizing from the server…'
      : 'Connection lost — reconnecting and resuming from the last event…';
  return `<div class="banner banner-reconnect">${esc(text)}</div>`;
}

// 2-D side view of the arm.  The six joint angles drive a three-link
// schematic (shoulder pitch, elbow, wrist pitch); base yaw shows as a small
// compass.  This is a drawing of the latest snapshot, not a simulation.
export function renderArm(vm: ConsoleViewModel): string {
  const pose = vm.pose.length === 6 ? vm.pose : [0, 45, 90, 0, -45, 0];
  const [yaw, shoulder, elbow, , wrist] = pose as [number, number, number, number, number, number];
  const rad = (deg: number) => (deg * Math.PI) / 180;
  const L = [52, 44, 26]; // link lengths in px
  let x = 80;
  let y = 120;
  let angle = rad(90 - (shoulder ?? 0)); // measured from the table plane
  const points = [[x, y]];
  const bends = [rad(-(elbow ?? 0) + 90), rad(-(wrist ?? 0))];
  for (let i = 0; i < 3; i++) {
    x += L[i]! * Math.cos(angle);
    y -= L[i]! * Math.sin(angle);
    points.push([x, y]);
    if (i < 2) angle += bends[i]!;
  }
  const path = points.map(([px, py]) => `${px!.toFixed(1)},${py!.toFixed(1)}`).join(' ');
  const [sx, sy] = points[3]!;
  const load = vm.spoonLoad > 0 ? `<circle cx="${sx!.toFixed(1)}" cy="${(sy! - 6).toFixed(1)}" r="${3 + vm.spoonLoad * 2}" class="arm-food"/>` : '';
  return `
    <svg viewBox="0 0 220 140" class="arm-svg" role="img" aria-label="arm side view">
      <line x1="0" y1="120" x2="220" y2="120" class="arm-table"/>
      <polyline points="${path}" class="arm-links"/>
      ${points.map(([px, py]) => `<circle cx="${px!.toFixed(1)}" cy="${py!.toFixed(1)}" r="4" class="arm-joint"/>`).join('')}
      ${load}
      <g class="arm-compass" transform="translate(196, 20)">
        <circle r="12"/>
        <line x1="0" y1="0" x2="${(10 * Math.sin(rad(yaw ?? 0))).toFixed(1)}" y2="${(-10 * Math.cos(rad(yaw ?? 0))).toFixed(1)}"/>
      </g>
    </svg>`;
}

export function renderBowls(vm: ConsoleViewModel): string {
  if (vm.bowls.length === 0) return '<p class="muted">No snapshot yet.</p>';
  const maxUnits = Math.max(1, ...vm.bowls.map((b) => b.center_units + b.edge_units));
  const gauges = vm.bowls
    .map((b, i) => {
      const total = b.center_units + b.edge_units;
      const pct = Math.round((100 * total) / maxUnits);
      return `
        <div class="bowl" data-bowl="${i}">
          <div class="bowl-gauge"><div class="bowl-fill" style="height:${pct}%"></div></div>
          <div class="bowl-label">${i} · ${esc(b.label)}</div>
          <div class="bowl-units">${b.center_units} center / ${b.edge_units} edge</div>
        </div>`;
    })
    .join('');
  const delivered = vm.delivered.reduce((a, b) => a + b, 0);
  return `
    <div class="bowls">${gauges}</div>
    <div class="bite-counter">
      <span class="bite-count">${vm.biteCount} bite${vm.biteCount === 1 ? '' : 's'}</span>
      <span class="muted">· ${delivered} units delivered · spoon ${vm.spoonLoad}</span>
      ${vm.lastBiteInterval !== null ? `<span class="muted">· last interval ${vm.lastBiteInterval.toFixed(1)} s</span>` : ''}
    </div>`;
}

export function renderCueLog(vm: ConsoleViewModel): string {
  if (vm.cueLog.length === 0) return '<p class="muted">No cues yet.</p>';
  return `<ol class="cue-log">${vm.cueLog
    .map((c) => {
      const label = CUE_LABELS[c.kind] ?? c.kind;
      const text = c.text ? `: ${esc(c.text)}` : '';
      return `<li class="cue cue-${esc(c.kind)}"><span class="cue-t">${c.t.toFixed(2)}s</span> ${esc(label)}${text}</li>`;
    })
    .join('')}</ol>`;
}

export function renderCommandBox(vm: ConsoleViewModel): string {
  const disabled = commandBoxEnabled(vm) ? '' : 'disabled';
  const spinner = vm.processing ? '<span class="spinner" aria-label="processing"></span>' : '';
  const resetBtn =
    vm.halted && !vm.haltAcknowledged
      ? '<button id="ack-halt" class="btn btn-reset">Reset</button>'
      : '';
  return `
    <div class="command-row">
      <input id="command-text" type="text" placeholder="e.g. feed me three scoops of granola" ${disabled}/>
      <label class="wake-toggle"><input id="wake-toggle" type="checkbox"/> say "Hey Obi" for me</label>
      <button id="send-command" class="btn" ${disabled}>Send</button>
      ${spinner}${resetBtn}
    </div>
    <div class="interrupt-row">
      <button id="btn-stop" class="btn btn-stop" ${interruptsEnabled(vm) ? '' : 'disabled'}>Stop</button>
      <button id="btn-pause" class="btn" ${interruptsEnabled(vm) ? '' : 'disabled'}>Pause</button>
      <button id="btn-resume" class="btn" ${interruptsEnabled(vm) ? '' : 'disabled'}>Resume</button>
    </div>`;
}

export function renderPlanInspector(vm: ConsoleViewModel): string {
  const last = vm.lastCommand;
  if (!last) return '<p class="muted">No command has run yet.</p>';
  const warnings = last.warnings.length
    ? `<ul class="warnings">${last.warnings.map((w) => `<li>${esc(w)}</li>`).join('')}</ul>`
    : '<p class="muted">no warnings</p>';
  const plan = last.plan
    ? `<table class="plan-table"><tr><th>#</th><th>step</th><th>details</th></tr>${last.plan
        .map((s, i) => {
          const details = Object.entries(s)
            .filter(([k]) => k !== 'kind')
            .map(([k, v]) => `${k}=${v}`)
            .join(' ');
          return `<tr><td>${i}</td><td>${esc(s.kind)}</td><td>${esc(details)}</td></tr>`;
        })
        .join('')}</table>`
    : `<p class="plan-error">${esc(last.error ?? 'rejected')}</p>`;
  return `
    <p class="inspector-command">“${esc(last.command)}” — ${last.ok ? 'ok' : 'failed'}</p>
    <h4>model completion</h4>
    <pre class="completion">${esc(last.completion ?? '(the model returned nothing)')}</pre>
    <h4>lowered plan</h4>
    ${plan}
    <h4>warnings</h4>
    ${warnings}`;
}

export function renderTaskPanel(vm: ConsoleViewModel): string {
  const t = vm.task;
  const options = ['', ...t.tasks]
    .map((name) => {
      const label = name === '' ? 'free feeding (no task)' : name;
      const sel = name === (t.selected ?? '') ? 'selected' : '';
      return `<option value="${esc(name)}" ${sel}>${esc(label)}</option>`;
    })
    .join('');
  let verdict = '<span class="muted">no attempts yet</span>';
  if (t.verdict) {
    const cls = t.verdict.startsWith('pass') ? 'verdict-pass' : t.failed ? 'verdict-failed' : 'verdict-fail';
    verdict = `<span class="${cls}">${esc(t.verdict)}${t.failed ? ' — task failed' : ''}</span>`;
  }
  const remaining = t.selected ? `<span class="muted">attempts remaining: ${attemptsRemaining(vm)}</span>` : '';
  return `
    <div class="task-row">
      <select id="task-select">${options}</select>
      ${remaining}
    </div>
    <div class="task-verdict">${verdict}</div>`;
}

export function renderToasts(vm: ConsoleViewModel): string {
  return vm.toasts
    .map((msg, i) => `<div class="toast" data-toast="${i}">${esc(msg)} <button class="toast-close" data-toast-close="${i}">×</button></div>`)
    .join('');
}

export function renderAudit(report: AuditReport | null): string {
  if (!report) return '<p class="muted">Audit runs after the first command.</p>';
  const headline =
    report.divergences.length === 0
      ? `<p class="audit-ok">No divergence — ${report.eventsAudited} trace events and ${report.snapshotsAudited} snapshots agree (${report.biteCount} bites, ${report.deliveredUnits} units delivered).</p>`
      : `<p class="audit-bad">${report.divergences.length} divergence(s) between the view and the raw event stream:</p>
         <ul class="audit-list">${report.divergences.map((d) => `<li>${esc(d)}</li>`).join('')}</ul>`;
  return headline;
}
