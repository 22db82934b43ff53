import type { DirectiveMsg, HelloMsg } from "../src/protocol.js";

/** Hello for a one-panel plant with a two-level template and one cluster. */
export function plantHello(): HelloMsg {
  return {
    type: "hello",
    session: "s-test",
    actions: [
      { id: "continue", name: "Continue burn" },
      { id: "halt", name: "Halt burn" },
    ],
    subsystems: ["plant"],
    templates: [{ subsystem: "plant", levels: [["S1"], ["S1", "S2"]] }],
    clusters: { backup: ["S2"] },
    phases: [{ start: 0, end: 8, phase: "burn" }],
  };
}

/** Hello with two subsystems, for slot-stability tests. */
export function twinHello(): HelloMsg {
  return {
    type: "hello",
    session: "s-twin",
    actions: [
      { id: "continue", name: "Continue" },
      { id: "halt", name: "Halt" },
    ],
    subsystems: ["left", "right"],
    templates: [
      { subsystem: "left", levels: [["L1"], ["L1", "L2"]] },
      { subsystem: "right", levels: [["R1"], ["R1", "R2", "R3"]] },
    ],
    clusters: {},
    phases: [{ start: 0, end: 4, phase: "cruise" }],
  };
}

export function directive(
  n: number,
  over: Partial<Omit<DirectiveMsg, "type" | "n">> = {},
): DirectiveMsg {
  return {
    type: "directive",
    n,
    levels: { plant: 0 },
    aux: [],
    highlights: [],
    faults: [
      { state: "nominal", p: 0.8 },
      { state: "leak", p: 0.2 },
    ],
    actions: [
      { id: "continue", eu: 0.8 },
      { id: "halt", eu: 0.6 },
    ],
    values: { S1: "low" },
    ...over,
  };
}
