import { beforeEach, describe, expect, it } from "vitest";
import { Client } from "../src/api.js";
import { renderQueue } from "../src/queue.js";
import { ConsoleSession } from "../src/session.js";
import { FakeServer, pendingQuery } from "./helpers.js";

let root: HTMLElement;

beforeEach(() => {
  root = document.createElement("div");
  document.body.replaceChildren(root);
});

async function queueOn(srv: FakeServer) {
  const s = new ConsoleSession(new Client("http://s", srv.fetch), "fake", 40);
  renderQueue(root, s);
  await s.tick();
  return s;
}

function awaitingServer() {
  const srv = new FakeServer();
  srv.detail.status = "AWAITING_LABELS";
  srv.pendingBody = pendingQuery(); // indices [1, 4, 7] of 10 points, K=2
  return srv;
}

const circle = (index: number) =>
  root.querySelector(`circle[data-index="${index}"]`) as SVGCircleElement;
const submitButton = () =>
  root.querySelector("button.submit") as HTMLButtonElement;
const pressKey = (key: string) =>
  document.dispatchEvent(new KeyboardEvent("keydown", { key, bubbles: true }));

describe("scatter labeling", () => {
  it("renders the full batch with the queried points highlighted", async () => {
    await queueOn(awaitingServer());
    expect(root.querySelectorAll("circle.pt").length).toBe(10);
    expect(root.querySelectorAll("circle.queried").length).toBe(3);
    expect(circle(1).classList.contains("selected")).toBe(true);
  });

  it("labels by digit key and moves selection to the next open sample", async () => {
    await queueOn(awaitingServer());
    pressKey("1");
    expect(root.querySelector(".queue-info")!.textContent).toBe(
      "step 3: 1/3 labeled",
    );
    expect(circle(1).getAttribute("fill")).toBe("#ff7f0e");
    expect(circle(4).classList.contains("selected")).toBe(true);
  });

  it("labels by class button and by clicking a point first", async () => {
    await queueOn(awaitingServer());
    circle(7).dispatchEvent(new MouseEvent("click"));
    (root.querySelector('button[data-class="0"]') as HTMLButtonElement).click();
    expect(circle(7).getAttribute("fill")).toBe("#1f77b4");
  });

  it("ignores digits at or beyond the class count", async () => {
    await queueOn(awaitingServer());
    pressKey("9");
    expect(root.querySelector(".queue-info")!.textContent).toBe(
      "step 3: 0/3 labeled",
    );
  });

  it("enables Submit only once every queried sample has a label", async () => {
    await queueOn(awaitingServer());
    pressKey("0");
    pressKey("1");
    expect(submitButton().disabled).toBe(true);
    pressKey("0");
    expect(submitButton().disabled).toBe(false);
  });

  it("shows estimate_pre -> estimate_post after a successful submit", async () => {
    const srv = awaitingServer();
    await queueOn(srv);
    pressKey("0");
    pressKey("1");
    pressKey("0");
    submitButton().click();
    await new Promise((r) => setTimeout(r, 0));
    expect(root.querySelector(".submit-result")!.textContent).toBe(
      "estimate 0.8500 -> 0.9000 after labeling",
    );
    expect(root.querySelector(".queue-idle")!.textContent).toBe(
      "no labels requested",
    );
    expect(srv.submitted.length).toBe(1);
  });

  it("keeps drafts and shows the rejection when the submit bounces", async () => {
    const srv = awaitingServer();
    srv.rejectSubmit = {
      status: 409,
      code: "wrong_state",
      message: "no label query is pending",
    };
    await queueOn(srv);
    pressKey("0");
    pressKey("1");
    pressKey("1");
    submitButton().click();
    await new Promise((r) => setTimeout(r, 0));
    expect(root.querySelector(".rejection")!.textContent).toBe(
      "rejected (wrong_state): no label query is pending",
    );
    expect(circle(1).getAttribute("fill")).toBe("#1f77b4");
    expect(circle(4).getAttribute("fill")).toBe("#ff7f0e");
    expect(submitButton().disabled).toBe(false);
  });

  it("sits idle when nothing is pending", async () => {
    const srv = new FakeServer();
    srv.detail.status = "DONE";
    await queueOn(srv);
    expect(root.querySelector(".queue-idle")).not.toBeNull();
    expect(root.querySelector("svg")).toBeNull();
  });
});

describe("tabular fallback", () => {
  it("lists queried samples as rows for higher-dimensional payloads", async () => {
    const srv = new FakeServer();
    srv.detail.status = "AWAITING_LABELS";
    srv.pendingBody = pendingQuery({
      indices: [0, 2],
      features: Array.from({ length: 6 }, (_, i) => [i, i * 2, i * 3]),
    });
    await queueOn(srv);
    expect(root.querySelector("svg")).toBeNull();
    const rows = root.querySelectorAll("tr[data-index]");
    expect(rows.length).toBe(2);
    // digit keys work against the selected row as well
    pressKey("1");
    expect(
      root.querySelector('tr[data-index="0"] td:last-child')!.textContent,
    ).toBe("1");
  });
});
