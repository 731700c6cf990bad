/**
 * DOM rendering for the oracle console.
 *
 * The what-if panel reads the served partition verbatim: a true answer
 * eliminates the rejecting side, a false answer the accepting side.
 */

import { DiagnosisView, PendingQueryView, SessionView } from "./api.js";
import { ConsoleState } from "./state.js";
import { displaySentence, formatDiagnosis, formatPercent, formatScore } from "./format.js";

export interface RenderCallbacks {
  onAnswer: (verdict: boolean) => void;
  onTogglePretty: () => void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function diagnosisLabel(view: SessionView, id: string): string {
  const match = view.diagnoses.find((d) => d.id === id);
  return match ? formatDiagnosis(match.components) : id;
}

function renderDiagnoses(view: SessionView): HTMLElement {
  const panel = el("section", "panel diagnoses");
  panel.append(el("h2", undefined, view.converged ? "Isolated diagnosis" : "Leading diagnoses"));
  const list = el("ul", "diagnosis-list");
  for (const diagnosis of view.diagnoses) {
    const item = el("li", "diagnosis");
    item.dataset.id = diagnosis.id;
    const bar = el("div", "bar");
    bar.style.width = `${Math.max(diagnosis.probability * 100, 2)}%`;
    item.append(
      el("span", "label", formatDiagnosis(diagnosis.components)),
      bar,
      el("span", "prob", formatPercent(diagnosis.probability)),
    );
    list.append(item);
  }
  panel.append(list);
  if (view.converged) {
    panel.append(el("p", "converged-note", "Session converged."));
  }
  return panel;
}

function renderQueryCard(
  view: SessionView,
  pending: PendingQueryView,
  pretty: boolean,
  callbacks: RenderCallbacks,
): HTMLElement {
  const card = el("section", "panel query-card");
  card.append(el("h2", undefined, `Measurement ${view.queries_asked + 1}`));

  const sentences = el("ul", "sentences");
  for (const sentence of pending.query.sentences) {
    const item = el("li", "sentence");
    item.append(
      el("code", undefined, displaySentence(sentence, pretty)),
      el("span", "cost", `cost ${pending.query.sentence_costs[sentence] ?? "?"}`),
    );
    sentences.append(item);
  }
  card.append(sentences);

  const scores = el("dl", "scores");
  const rows: [string, string][] = [
    ["selection score", formatScore(pending.scores.m_value)],
    ["query cost", formatScore(pending.scores.c_value, 2)],
    ["p(answer = true)", formatScore(pending.scores.p_true, 3)],
  ];
  for (const [label, value] of rows) {
    scores.append(el("dt", undefined, label), el("dd", undefined, value));
  }
  card.append(scores);

  const whatIf = el("div", "what-if");
  const ifTrue = el("div", "if-true");
  ifTrue.append(el("h3", undefined, "Answering TRUE eliminates"));
  const trueList = el("ul");
  for (const id of pending.partition.dminus) {
    trueList.append(el("li", undefined, diagnosisLabel(view, id)));
  }
  ifTrue.append(trueList);
  const ifFalse = el("div", "if-false");
  ifFalse.append(el("h3", undefined, "Answering FALSE eliminates"));
  const falseList = el("ul");
  for (const id of pending.partition.dplus) {
    falseList.append(el("li", undefined, diagnosisLabel(view, id)));
  }
  ifFalse.append(falseList);
  whatIf.append(ifTrue, ifFalse);
  card.append(whatIf);

  const buttons = el("div", "answer-buttons");
  const yes = el("button", "answer-true", "All sentences hold");
  yes.addEventListener("click", () => callbacks.onAnswer(true));
  const no = el("button", "answer-false", "Some sentence fails");
  no.addEventListener("click", () => callbacks.onAnswer(false));
  buttons.append(yes, no);
  card.append(buttons);
  return card;
}

function renderHistory(state: ConsoleState): HTMLElement {
  const panel = el("section", "panel history");
  panel.append(el("h2", undefined, "Answer history"));
  const list = el("ol", "timeline");
  for (const entry of state.history) {
    const item = el("li", `entry ${entry.answer ? "answer-true" : "answer-false"}`);
    const sentences = entry.query.sentences
      .map((s) => displaySentence(s, state.pretty))
      .join(", ");
    item.append(
      el("code", undefined, `{${sentences}}`),
      el("span", "verdict", entry.answer ? "true" : "false"),
      el("span", "before", `${entry.diagnoses_before.length} candidates before`),
    );
    list.append(item);
  }
  if (!state.history.length) {
    list.append(el("li", "entry empty", "no answers yet"));
  }
  panel.append(list);
  return panel;
}

export function render(
  root: HTMLElement,
  state: ConsoleState,
  callbacks: RenderCallbacks,
): void {
  root.replaceChildren();

  if (state.error) {
    root.append(el("div", "error-banner", state.error));
  }
  if (!state.view) {
    root.append(el("p", "placeholder", "Load a problem instance to begin."));
    return;
  }

  const toggle = el("label", "pretty-toggle");
  const checkbox = el("input");
  checkbox.type = "checkbox";
  checkbox.checked = state.pretty;
  checkbox.addEventListener("change", () => callbacks.onTogglePretty());
  toggle.append(checkbox, document.createTextNode(" symbol notation"));
  root.append(toggle);

  root.append(renderDiagnoses(state.view));
  if (state.view.pending && !state.view.converged) {
    root.append(renderQueryCard(state.view, state.view.pending, state.pretty, callbacks));
  }
  root.append(renderHistory(state));
  if (state.busy) {
    root.append(el("div", "busy", "working…"));
  }
}
