/**
 * Terminal demo: connect to a running session server, auto-tick in lockstep,
 * and print what the operator console would show each frame.
 *
 *   python3 -m fovea serve models/mini.scenario.json --lockstep --port 8765 &
 *   npm run demo -- 127.0.0.1 8765
 */

import { Window } from "happy-dom";

import { ConsoleClient } from "./client.js";
import { connectTcp } from "./transport.js";

function projection(root: Element): string {
  const lines: string[] = [];
  for (const panel of root.querySelectorAll(".panel")) {
    const name = panel.querySelector("h2")?.textContent ?? "?";
    const level = panel.querySelector(".level")?.textContent ?? "";
    const readings = [...panel.querySelectorAll(".readings li")]
      .map((li) => li.textContent)
      .join(", ");
    lines.push(`  [${panel.getAttribute("data-slot")}] ${name} (${level}): ${readings}`);
  }
  const faults = [...root.querySelectorAll(".faults li")]
    .map((li) => li.textContent)
    .join(" | ");
  lines.push(`  faults: ${faults}`);
  return lines.join("\n");
}

async function main(): Promise<void> {
  const host = process.argv[2] ?? "127.0.0.1";
  const port = Number(process.argv[3] ?? 8765);
  const dom = new Window();
  const mount = dom.document.createElement("div");
  dom.document.body.appendChild(mount);

  const client = new ConsoleClient(mount as unknown as Element);
  const transport = await connectTcp(host, port, {
    onLine: (line) => client.onLine(line),
    onClose: () => client.onDisconnect(),
  });
  client.attach(transport);

  await client.nextOfType("hello");
  console.log(`session ${client.store.hello?.session}`);
  while (client.store.status === "live") {
    client.tick();
    let msg = await client.nextMessage();
    while (msg.type === "frame" || msg.type === "inference") {
      msg = await client.nextMessage();
    }
    if (msg.type === "directive") {
      console.log(`frame ${msg.n}`);
      console.log(projection(mount as unknown as Element));
      await new Promise((r) => setTimeout(r, 300));
    } else {
      break;
    }
  }
  const end = client.store.outcome;
  if (end !== null) {
    console.log(
      `ended: action=${end.action} delay=${end.delay} utility=${end.utility}`,
    );
  }
  transport.close();
}

main().catch((err) => {
  console.error(err);
  process.exit(1);
});
