// Self-audit: recompute bowl levels and bite counts from the raw event
// stream and compare them with what the view (driven by state snapshots)
// is showing.  Zero divergences means the console cannot be lying about
// food totals, whatever rendering bugs it might have.
//
// Three independent checks:
//   1. per-event continuity — each scoop/scrape's before-state implied by
//      its `*_after` fields must chain onto the previous event for that
//      bowl, and spoon/bite deltas must balance;
//   2. snapshot agreement — the latest state snapshot must equal the
//      levels recomputed from the trace;
//   3. conservation — the grand total (bowls + spoon + delivered) must be
//      identical in every snapshot of the stream.

import type { StatePayload, TracePayload, WireEvent } from './types.js';
import { isStateEvent, isTraceEvent } from './types.js';

interface BowlLedger {
  center: number;
  edge: number;
}

export interface AuditReport {
  divergences: string[];
  eventsAudited: number;
  snapshotsAudited: number;
  biteCount: number;
  deliveredUnits: number;
  bowlsSeen: number[]; // bowl indices that appeared in trace events
}

export function auditStream(events: Iterable<WireEvent>): AuditReport {
  const divergences: string[] = [];
  const bowls = new Map<number, BowlLedger>();
  const traceBowls = new Set<number>();
  let spoon: number | null = null;
  let biteCount = 0;
  let deliveredUnits = 0;
  let deliveredBaseline: number | null = null; // snapshot delivered before this window's bites
  let eventsAudited = 0;
  let snapshotsAudited = 0;
  let grandTotal: number | null = null;
  let lastSnapshot: StatePayload | null = null;

  const seed = (bowl: number, center: number, edge: number) => {
    bowls.set(bowl, { center, edge });
  };

  for (const ev of events) {
    if (isTraceEvent(ev)) {
      eventsAudited += 1;
      auditTrace(ev.payload);
    } else if (isStateEvent(ev) && ev.payload.error === undefined) {
      snapshotsAudited += 1;
      auditSnapshot(ev.payload, ev.seq);
      lastSnapshot = ev.payload;
    }
  }

  function auditTrace(ev: TracePayload): void {
    switch (ev.kind) {
      case 'scoop_completed': {
        const bowl = ev.bowl!;
        const units = ev.units!;
        traceBowls.add(bowl);
        const known = bowls.get(bowl);
        if (known) {
          if (known.center - units !== ev.center_after || known.edge !== ev.edge_after) {
            divergences.push(
              `scoop at t=${ev.t}: bowl ${bowl} expected ` +
                `${known.center - units}/${known.edge} but event says ` +
                `${ev.center_after}/${ev.edge_after}`,
            );
          }
        }
        seed(bowl, ev.center_after!, ev.edge_after!);
        if (spoon !== null && ev.spoon_load !== undefined && spoon + units !== ev.spoon_load) {
          divergences.push(
            `scoop at t=${ev.t}: spoon expected ${spoon + units}, event says ${ev.spoon_load}`,
          );
        }
        spoon = ev.spoon_load ?? (spoon === null ? units : spoon + units);
        break;
      }
      case 'scrape_performed': {
        const bowl = ev.bowl!;
        const moved = ev.units_moved!;
        traceBowls.add(bowl);
        const known = bowls.get(bowl);
        if (known) {
          if (known.center + moved !== ev.center_after || known.edge - moved !== ev.edge_after) {
            divergences.push(
              `scrape at t=${ev.t}: bowl ${bowl} expected ` +
                `${known.center + moved}/${known.edge - moved} but event says ` +
                `${ev.center_after}/${ev.edge_after}`,
            );
          }
        }
        seed(bowl, ev.center_after!, ev.edge_after!);
        break;
      }
      case 'bite_delivered': {
        const units = ev.units!;
        biteCount += 1;
        deliveredUnits += units;
        if (spoon !== null) {
          if (spoon < units) {
            divergences.push(`bite at t=${ev.t}: delivered ${units} units off a spoon holding ${spoon}`);
          }
          spoon -= units;
        }
        break;
      }
      default:
        break;
    }
  }

  function auditSnapshot(snap: StatePayload, seq: number): void {
    for (let bowl = 0; bowl < snap.bowls.length; bowl++) {
      const shown = snap.bowls[bowl]!;
      const ledger = bowls.get(bowl);
      if (!ledger) {
        // first sighting of this bowl: the snapshot seeds the ledger, so
        // later trace events for it are checked against real levels
        seed(bowl, shown.center_units, shown.edge_units);
        continue;
      }
      if (shown.center_units !== ledger.center || shown.edge_units !== ledger.edge) {
        divergences.push(
          `snapshot seq=${seq}: bowl ${bowl} shows ` +
            `${shown.center_units}/${shown.edge_units}, trace implies ` +
            `${ledger.center}/${ledger.edge}`,
        );
      }
    }
    if (spoon === null) spoon = snap.spoon_load;
    else if (snap.spoon_load !== spoon) {
      divergences.push(`snapshot seq=${seq}: spoon shows ${snap.spoon_load}, trace implies ${spoon}`);
    }
    const snapDelivered = snap.delivered.reduce((a, b) => a + b, 0);
    if (deliveredBaseline === null) deliveredBaseline = snapDelivered - deliveredUnits;
    if (snapDelivered !== deliveredBaseline + deliveredUnits) {
      divergences.push(
        `snapshot seq=${seq}: delivered shows ${snapDelivered} units, trace implies ` +
          `${deliveredBaseline + deliveredUnits}`,
      );
    }
    const total =
      snap.bowls.reduce((a, b) => a + b.center_units + b.edge_units, 0) +
      snap.spoon_load +
      snapDelivered;
    if (grandTotal === null) grandTotal = total;
    else if (total !== grandTotal) {
      divergences.push(`snapshot seq=${seq}: food total ${total} != initial ${grandTotal}`);
    }
  }

  // the view renders the last snapshot; a stream with trace events but no
  // closing snapshot cannot be cross-checked, which is itself divergence
  if (eventsAudited > 0 && lastSnapshot === null) {
    divergences.push('trace events arrived without any state snapshot to audit against');
  }

  return {
    divergences,
    eventsAudited,
    snapshotsAudited,
    biteCount,
    deliveredUnits,
    bowlsSeen: [...traceBowls].sort((a, b) => a - b),
  };
}
