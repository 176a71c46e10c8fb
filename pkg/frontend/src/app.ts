/**
 * Page wiring for the tree walker.
 *
 * Offline-first: loading and walking a tree needs no server. The what-if
 * panel is the only feature that talks to one, via POST /v1/resolve with
 * the cursor's state and residual budget.
 */

import { ClientError, SolveClient, SolveResponse } from "./client.js";
import { WalkError, WalkSession, loadTree } from "./session.js";
import { TreeDocument, TreeFormatError, nodeAt } from "./treeJson.js";

interface AppState {
  session: WalkSession | null;
  scenario: unknown | null;
  scenarioName: string | null;
  redo: number[];
  whatIf: SolveResponse | null;
  client: SolveClient;
}

const state: AppState = {
  session: null,
  scenario: null,
  scenarioName: null,
  redo: [],
  whatIf: null,
  client: new SolveClient("http://127.0.0.1:8000"),
};

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (found === null) throw new Error(`missing element #${id}`);
  return found as T;
}

function showBanner(message: string | null): void {
  const banner = el<HTMLDivElement>("error-banner");
  banner.textContent = message ?? "";
  banner.hidden = message === null;
}

let toastTimer: ReturnType<typeof setTimeout> | undefined;

function showToast(message: string): void {
  const toast = el<HTMLDivElement>("toast");
  toast.textContent = message;
  toast.hidden = false;
  clearTimeout(toastTimer);
  toastTimer = setTimeout(() => {
    toast.hidden = true;
  }, 6000);
}

function formatProbability(p: number): string {
  return p.toFixed(6).replace(/0+$/, "").replace(/\.$/, "");
}

function renderTree(tree: TreeDocument, highlight: string | null): HTMLElement {
  const build = (key: string, edgeLabel: string | null): HTMLElement => {
    const node = nodeAt(tree, key);
    const label = document.createElement("span");
    label.className = "node-label" + (key === highlight ? " cursor" : "");
    const edge = edgeLabel === null ? "" : `${edgeLabel} `;
    if (node.action === null) {
      label.textContent = `${edge}reward ${node.reward.raw}`;
    } else {
      label.textContent = `${edge}take ${node.action}`;
    }
    if (node.children.size === 0) {
      const leaf = document.createElement("div");
      leaf.className = "tree-leaf";
      leaf.append(label);
      return leaf;
    }
    const details = document.createElement("details");
    details.open = true;
    const summary = document.createElement("summary");
    summary.append(label);
    details.append(summary);
    const list = document.createElement("ul");
    for (const [outcome, child] of [...node.children.entries()].sort((a, b) => a[0] - b[0])) {
      const item = document.createElement("li");
      item.append(build(child.key, `on ${outcome} (p=${formatProbability(child.probability)})`));
      list.append(item);
    }
    details.append(list);
    return details;
  };
  const container = document.createElement("div");
  container.className = "tree-view";
  container.append(build(tree.root, null));
  return container;
}

function renderWalkCard(): void {
  const card = el<HTMLDivElement>("walk-card");
  const outcomes = el<HTMLDivElement>("outcome-buttons");
  outcomes.replaceChildren();
  const session = state.session;
  if (session === null) {
    card.hidden = true;
    return;
  }
  card.hidden = false;
  const node = session.node;
  el<HTMLSpanElement>("cursor-state").textContent = session.cursor;
  el<HTMLSpanElement>("prescription").textContent = session.isTerminal
    ? `terminal, reward ${node.reward.raw} (normalized ${node.reward.normalized})`
    : `take ${session.prescription}`;
  el<HTMLSpanElement>("path-probability").textContent = formatProbability(
    session.pathProbability,
  );
  el<HTMLSpanElement>("remaining-budget").textContent = String(session.remainingBudget);
  el<HTMLSpanElement>("score-to-go").textContent =
    `${node.score} (raw ${node.score * session.tree.rewardScale})`;

  const crumbs = el<HTMLOListElement>("breadcrumb");
  crumbs.replaceChildren();
  for (const step of session.breadcrumb) {
    const item = document.createElement("li");
    item.textContent = `${step.action} -> ${step.outcomeId} (p=${formatProbability(step.probability)})`;
    crumbs.append(item);
  }

  for (const outcomeId of session.outcomeIds()) {
    const edge = session.outcomeEdge(outcomeId);
    if (edge === undefined) continue;
    const button = document.createElement("button");
    button.textContent = `outcome ${outcomeId} (p=${formatProbability(edge.probability)})`;
    button.addEventListener("click", () => advance(outcomeId));
    outcomes.append(button);
  }

  el<HTMLButtonElement>("undo").disabled = !session.canUndo();
  el<HTMLButtonElement>("redo").disabled = state.redo.length === 0;
  el<HTMLButtonElement>("what-if").disabled = state.scenario === null;
  el<HTMLSpanElement>("what-if-hint").hidden = state.scenario !== null;
}

function render(): void {
  const treeHost = el<HTMLDivElement>("tree-panel");
  treeHost.replaceChildren();
  if (state.session !== null) {
    treeHost.append(renderTree(state.session.tree, state.session.cursor));
  }
  const whatIfHost = el<HTMLDivElement>("what-if-panel");
  whatIfHost.replaceChildren();
  if (state.whatIf !== null) {
    const heading = document.createElement("p");
    const { normalized, raw } = state.whatIf.score;
    heading.textContent = `re-solved score ${normalized} (raw ${raw})`;
    whatIfHost.append(heading, renderTree(state.whatIf.tree, null));
  }
  renderWalkCard();
}

function advance(outcomeId: number): void {
  if (state.session === null) return;
  try {
    state.session = state.session.recordOutcome(outcomeId);
  } catch (err) {
    if (err instanceof WalkError) {
      showToast(err.message);
      return;
    }
    throw err;
  }
  if (state.redo[state.redo.length - 1] === outcomeId) {
    state.redo.pop();
  } else {
    state.redo = [];
  }
  state.whatIf = null;
  render();
}

function undo(): void {
  if (state.session === null || !state.session.canUndo()) return;
  const last = state.session.breadcrumb[state.session.breadcrumb.length - 1];
  if (last !== undefined) state.redo.push(last.outcomeId);
  state.session = state.session.undo();
  state.whatIf = null;
  render();
}

function redo(): void {
  const outcomeId = state.redo[state.redo.length - 1];
  if (outcomeId !== undefined) advance(outcomeId);
}

async function whatIf(): Promise<void> {
  const session = state.session;
  if (session === null || state.scenario === null) return;
  try {
    state.whatIf = await state.client.resolve(
      state.scenario,
      session.node.state,
      session.remainingBudget,
    );
  } catch (err) {
    if (err instanceof ClientError) {
      if (err.kind === "cancelled") return;
      const note = err.kind === "network" ? "; the walk continues offline" : "";
      showToast(`what-if failed: ${err.message}${note}`);
      return;
    }
    throw err;
  }
  render();
}

async function onTreeFile(input: HTMLInputElement): Promise<void> {
  const file = input.files?.[0];
  if (file === undefined) return;
  try {
    state.session = loadTree(await file.text());
  } catch (err) {
    if (err instanceof TreeFormatError) {
      showBanner(`could not load tree: ${err.message}`);
      return;
    }
    throw err;
  }
  state.redo = [];
  state.whatIf = null;
  showBanner(null);
  render();
}

async function onScenarioFile(input: HTMLInputElement): Promise<void> {
  const file = input.files?.[0];
  if (file === undefined) return;
  try {
    state.scenario = JSON.parse(await file.text());
  } catch (err) {
    showBanner(`could not load scenario: ${err instanceof Error ? err.message : String(err)}`);
    return;
  }
  state.scenarioName = file.name;
  showBanner(null);
  render();
}

export function main(): void {
  el<HTMLInputElement>("tree-file").addEventListener("change", (event) =>
    onTreeFile(event.target as HTMLInputElement),
  );
  el<HTMLInputElement>("scenario-file").addEventListener("change", (event) =>
    onScenarioFile(event.target as HTMLInputElement),
  );
  el<HTMLInputElement>("server-url").addEventListener("change", (event) => {
    const url = (event.target as HTMLInputElement).value.replace(/\/+$/, "");
    state.client = new SolveClient(url);
  });
  el<HTMLButtonElement>("undo").addEventListener("click", undo);
  el<HTMLButtonElement>("redo").addEventListener("click", redo);
  el<HTMLButtonElement>("what-if").addEventListener("click", () => void whatIf());
  render();
}

main();
