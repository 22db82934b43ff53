/**
 * DOM view: one fixed panel per subsystem plus fault/action/aux sidebars.
 *
 * The skeleton is built once from the hello message and only its contents
 * change afterwards; panel elements are never created, removed, or reordered
 * mid-session. Every sensor reading shown comes from a directive's values
 * map: variables directed at the current level but not revealed render as
 * collapsed placeholders with no state text, and the expand buttons are the
 * manual path to them.
 */

import { PanelLayout } from "./panels.js";
import type {
  AckMsg,
  DirectiveMsg,
  EndMsg,
  HelloMsg,
} from "./protocol.js";

/** Single-hue tint; opacity tracks highlight intensity linearly. */
export function tintFor(intensity: number): string {
  return `rgba(255, 176, 0, ${intensity.toFixed(3)})`;
}

export interface ViewCallbacks {
  onAction?(id: string): void;
  onExpand?(subsystem: string, level: number): void;
  onCollapse?(subsystem: string): void;
}

export class ConsoleView {
  readonly layout: PanelLayout;
  private readonly doc: Document;
  private readonly clusters: Map<string, string[]>;
  private readonly panelEls = new Map<string, HTMLElement>();
  private readonly actionButtons = new Map<string, HTMLButtonElement>();
  private readonly statusEl: HTMLElement;
  private readonly noticeEl: HTMLElement;
  private readonly faultsEl: HTMLElement;
  private readonly actionsEl: HTMLElement;
  private readonly auxEl: HTMLElement;
  private readonly outcomeEl: HTMLElement;

  constructor(
    private readonly root: Element,
    hello: HelloMsg,
    private readonly callbacks: ViewCallbacks = {},
  ) {
    this.layout = new PanelLayout(hello);
    this.doc = root.ownerDocument!;
    this.clusters = new Map(Object.entries(hello.clusters));
    root.replaceChildren();

    const header = this.el("header");
    header.append(this.text("h1", `session ${hello.session}`));
    this.statusEl = this.text("p", "live", "status");
    header.append(this.statusEl);
    root.append(header);

    const panels = this.el("section", "panels");
    for (const slot of this.layout.slots) {
      const panel = this.el("div", "panel");
      panel.dataset.subsystem = slot.subsystem;
      panel.dataset.slot = String(slot.index);
      panel.append(this.text("h2", slot.subsystem));
      panel.append(this.text("p", "level 0", "level"));
      panel.append(this.el("ul", "readings"));
      const expand = this.button("expand", () =>
        this.callbacks.onExpand?.(
          slot.subsystem,
          this.layout.maxLevel(slot.subsystem),
        ),
      );
      const collapse = this.button("collapse", () =>
        this.callbacks.onCollapse?.(slot.subsystem),
      );
      panel.append(expand, collapse);
      panels.append(panel);
      this.panelEls.set(slot.subsystem, panel);
    }
    root.append(panels);

    const aside = this.el("section", "sidebars");
    this.faultsEl = this.el("ol", "faults");
    this.actionsEl = this.el("ol", "ranked-actions");
    this.auxEl = this.el("ul", "aux");
    aside.append(
      this.labelled("faults", this.faultsEl),
      this.labelled("actions", this.actionsEl),
      this.labelled("auxiliary", this.auxEl),
    );
    root.append(aside);

    const bar = this.el("div", "action-bar");
    for (const action of hello.actions) {
      const btn = this.button(action.name, () =>
        this.callbacks.onAction?.(action.id),
      );
      btn.dataset.action = action.id;
      this.actionButtons.set(action.id, btn);
      bar.append(btn);
    }
    root.append(bar);

    this.noticeEl = this.text("p", "", "notice");
    this.outcomeEl = this.text("p", "", "outcome");
    root.append(this.noticeEl, this.outcomeEl);
  }

  panelElement(subsystem: string): HTMLElement {
    const panel = this.panelEls.get(subsystem);
    if (panel === undefined) {
      throw new Error(`unknown subsystem ${JSON.stringify(subsystem)}`);
    }
    return panel;
  }

  renderDirective(d: DirectiveMsg): void {
    for (const slot of this.layout.slots) {
      this.renderPanel(slot.subsystem, d);
    }
    this.faultsEl.replaceChildren(
      ...d.faults.map((f) =>
        this.text("li", `${f.state}  p=${f.p.toFixed(4)}`),
      ),
    );
    this.actionsEl.replaceChildren(
      ...d.actions.map((a) =>
        this.text("li", `${a.id}  eu=${a.eu.toFixed(4)}`),
      ),
    );
    this.auxEl.replaceChildren(
      ...d.aux.map((name) => {
        const item = this.text("li", "");
        item.append(this.text("span", name, "cluster"));
        const list = this.el("ul");
        for (const varId of this.clusters.get(name) ?? []) {
          const value = d.values[varId];
          if (value !== undefined) {
            list.append(this.reading(varId, value, d));
          }
        }
        item.append(list);
        return item;
      }),
    );
    this.noticeEl.textContent = "";
  }

  private renderPanel(subsystem: string, d: DirectiveMsg): void {
    const panel = this.panelElement(subsystem);
    const level = this.layout.clampLevel(subsystem, d.levels[subsystem] ?? 0);
    panel.querySelector(".level")!.textContent = `level ${level}`;
    const list = panel.querySelector(".readings")!;
    const items: HTMLElement[] = [];
    for (const varId of this.layout.variablesAt(subsystem, level)) {
      const value = d.values[varId];
      items.push(
        value === undefined
          ? this.collapsed(varId)
          : this.reading(varId, value, d),
      );
    }
    list.replaceChildren(...items);
  }

  private reading(varId: string, value: string, d: DirectiveMsg): HTMLElement {
    const li = this.text("li", `${varId} = ${value}`, "reading");
    const hl = d.highlights.find((h) => h.id === varId);
    if (hl !== undefined) {
      li.style.backgroundColor = tintFor(hl.intensity);
      li.dataset.intensity = String(hl.intensity);
    }
    return li;
  }

  private collapsed(varId: string): HTMLElement {
    return this.text("li", `${varId} …`, "collapsed");
  }

  renderAck(ack: AckMsg): void {
    this.noticeEl.textContent = ack.ok ? "" : `refused: ${ack.err ?? ""}`;
  }

  renderEnd(end: EndMsg): void {
    const action = end.action ?? "none";
    this.outcomeEl.textContent =
      `ended: action=${action} delay=${end.delay.toFixed(2)} ` +
      `utility=${end.utility.toFixed(4)}`;
    this.statusEl.textContent = "ended";
    this.setButtonsEnabled(false);
  }

  renderStatus(status: string): void {
    this.statusEl.textContent = status;
  }

  setButtonsEnabled(enabled: boolean): void {
    for (const btn of this.actionButtons.values()) {
      btn.disabled = !enabled;
    }
  }

  /** All reading strings currently on screen, as "var = value" pairs. */
  visibleReadings(): string[] {
    const out: string[] = [];
    for (const li of this.root.querySelectorAll("li.reading")) {
      out.push(li.textContent ?? "");
    }
    return out;
  }

  private el(tag: string, cls?: string): HTMLElement {
    const node = this.doc.createElement(tag);
    if (cls !== undefined) node.className = cls;
    return node;
  }

  private text(tag: string, content: string, cls?: string): HTMLElement {
    const node = this.el(tag, cls);
    node.textContent = content;
    return node;
  }

  private labelled(title: string, body: HTMLElement): HTMLElement {
    const wrap = this.el("div", "sidebar");
    wrap.append(this.text("h2", title), body);
    return wrap;
  }

  private button(label: string, onClick: () => void): HTMLButtonElement {
    const btn = this.el("button") as HTMLButtonElement;
    btn.textContent = label;
    btn.addEventListener("click", onClick);
    return btn;
  }
}
