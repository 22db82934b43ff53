/**
 * Fixed panel layout for a session.
 *
 * Slots are assigned once, from the hello message, in declaration order, and
 * never move afterwards: the operator learns where each subsystem lives and
 * that location stays put no matter how detail levels change. The slot list
 * is frozen so an accidental reassignment throws instead of silently
 * reshuffling the display.
 */

import type { HelloMsg, TemplateInfo } from "./protocol.js";

export interface PanelSlot {
  readonly subsystem: string;
  readonly index: number;
}

export class PanelLayout {
  readonly slots: readonly PanelSlot[];
  private readonly bySubsystem: Map<string, PanelSlot>;
  private readonly templates: Map<string, TemplateInfo>;

  constructor(hello: HelloMsg) {
    const slots = hello.subsystems.map((subsystem, index) =>
      Object.freeze({ subsystem, index }),
    );
    this.slots = Object.freeze(slots);
    this.bySubsystem = new Map(slots.map((s) => [s.subsystem, s]));
    this.templates = new Map(hello.templates.map((t) => [t.subsystem, t]));
    for (const s of hello.subsystems) {
      if (!this.templates.has(s)) {
        throw new Error(`no template for subsystem ${JSON.stringify(s)}`);
      }
    }
  }

  slotFor(subsystem: string): PanelSlot {
    const slot = this.bySubsystem.get(subsystem);
    if (slot === undefined) {
      throw new Error(`unknown subsystem ${JSON.stringify(subsystem)}`);
    }
    return slot;
  }

  template(subsystem: string): TemplateInfo {
    this.slotFor(subsystem);
    return this.templates.get(subsystem)!;
  }

  maxLevel(subsystem: string): number {
    return this.template(subsystem).levels.length - 1;
  }

  clampLevel(subsystem: string, level: number): number {
    return Math.max(0, Math.min(level, this.maxLevel(subsystem)));
  }

  /** Variable ids visible on a panel at the given detail level. */
  variablesAt(subsystem: string, level: number): string[] {
    const template = this.template(subsystem);
    return template.levels[this.clampLevel(subsystem, level)] ?? [];
  }
}
