import { Client } from "./api.js";
import { renderDashboard } from "./dashboard.js";
import { renderQueue } from "./queue.js";
import { ConsoleSession } from "./session.js";

function param(name: string, fallback: string): string {
  return new URLSearchParams(window.location.search).get(name) ?? fallback;
}

export function mount(root: HTMLElement): ConsoleSession {
  const base = param("server", "");
  const client = new Client(base);
  const session = new ConsoleSession(
    client,
    param("run", "run"),
    Number(param("poll", "1000")),
  );

  const dash = document.createElement("section");
  dash.id = "dashboard";
  const queue = document.createElement("section");
  queue.id = "queue";
  root.replaceChildren(dash, queue);

  renderDashboard(dash, session);
  renderQueue(queue, session);
  session.start();
  return session;
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  mount(document.getElementById("app")!);
}
