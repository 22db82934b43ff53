/**
 * Glue between a transport, the session state, and the DOM view.
 *
 * The view is created on the hello message and updated in arrival order;
 * stale messages are dropped by the store before they reach the DOM. Action
 * clicks are ignored while an action is pending or after the session ends,
 * matching the store's single-pending-action invariant.
 */

import type { ClientMsg, ServerMsg } from "./protocol.js";
import { encodeClientMsg, parseServerLine } from "./protocol.js";
import { ConsoleStore } from "./state.js";
import { ConsoleView } from "./render.js";
import type { Transport } from "./transport.js";

const QUEUE_CAP = 1024;

export class ConsoleClient {
  readonly store = new ConsoleStore();
  view: ConsoleView | null = null;
  private transport: Transport | null = null;
  private queue: ServerMsg[] = [];
  private waiters: Array<(msg: ServerMsg) => void> = [];

  constructor(private readonly mount: Element) {}

  attach(transport: Transport): void {
    this.transport = transport;
  }

  /** Feed one raw line from the server. */
  onLine(line: string): void {
    this.onMessage(parseServerLine(line));
  }

  onMessage(msg: ServerMsg): void {
    const fresh = this.store.apply(msg);
    if (msg.type === "hello") {
      this.view = new ConsoleView(this.mount, msg, {
        onAction: (id) => this.act(id),
        onExpand: (subsystem, level) => this.expand(subsystem, level),
        onCollapse: (subsystem) => this.expand(subsystem, -1),
      });
    } else if (fresh && this.view !== null) {
      if (msg.type === "directive") this.view.renderDirective(msg);
      else if (msg.type === "ack") this.view.renderAck(msg);
      else if (msg.type === "end") this.view.renderEnd(msg);
    }
    if (msg.type === "ack" && this.view !== null) {
      this.view.setButtonsEnabled(this.store.canAct());
    }
    const waiter = this.waiters.shift();
    if (waiter !== undefined) {
      waiter(msg);
    } else {
      this.queue.push(msg);
      if (this.queue.length > QUEUE_CAP) this.queue.shift();
    }
  }

  onDisconnect(): void {
    this.store.markClosed();
    this.view?.renderStatus("disconnected");
  }

  /** Next message in arrival order; buffered, so bursts are never missed. */
  nextMessage(): Promise<ServerMsg> {
    const queued = this.queue.shift();
    if (queued !== undefined) return Promise.resolve(queued);
    return new Promise((resolve) => this.waiters.push(resolve));
  }

  async nextOfType(type: ServerMsg["type"]): Promise<ServerMsg> {
    for (;;) {
      const msg = await this.nextMessage();
      if (msg.type === type) return msg;
    }
  }

  tick(): void {
    this.send({ type: "tick" });
  }

  /** Send the operator's decision for the latest rendered frame. */
  act(id: string): boolean {
    const msg = this.store.beginAction(id);
    if (msg === null) return false;
    this.view?.setButtonsEnabled(false);
    this.send(msg);
    return true;
  }

  /** Manual detail request; level -1 returns the panel to policy control. */
  expand(subsystem: string, level: number): boolean {
    const msg = this.store.beginExpand(subsystem, level);
    if (msg === null) return false;
    this.send(msg);
    return true;
  }

  private send(msg: ClientMsg): void {
    if (this.transport === null) throw new Error("not connected");
    this.transport.send(encodeClientMsg(msg));
  }
}
