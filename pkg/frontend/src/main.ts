import { ApiError, WorkbenchApi } from "./api.js";
import {
  candidatePanel,
  parseSplitDraft,
  siblingPairs,
  validateSplit,
  type CandidateRowVM,
} from "./candidates.js";
import { layoutHierarchy } from "./hierarchy.js";
import { barChart, biplot, ternaryPlot } from "./plots.js";
import {
  candidateTableHtml,
  hierarchySvg,
  summaryHtml,
  traceTableHtml,
} from "./render.js";
import type { EvaluateResponse, SessionSummary, StateDoc } from "./types.js";

/** DOM wiring. The workbench is a pure view over the service: every action
 * round-trips before anything re-renders, and a full refetch reproduces the
 * identical screen. */

const api = new WorkbenchApi("");

interface AppState {
  summary: SessionSummary | null;
  state: StateDoc | null;
  evaluation: EvaluateResponse | null;
  evaluationRows: CandidateRowVM[];
  evaluationContext: { num: string; den: string }[];
}

const app: AppState = {
  summary: null,
  state: null,
  evaluation: null,
  evaluationRows: [],
  evaluationContext: [],
};

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function setStatus(text: string, isError = false): void {
  const status = el<HTMLElement>("status");
  status.textContent = text;
  status.className = isError ? "error" : "";
}

async function refetchState(): Promise<void> {
  if (!app.summary) {
    return;
  }
  app.state = await api.state(app.summary.id);
  renderAll();
}

async function guard(action: () => Promise<void>): Promise<void> {
  try {
    await action();
    setStatus("ok");
  } catch (err) {
    if (err instanceof ApiError) {
      setStatus(`service refused (${err.status}): ${err.message}`, true);
      if (err.status === 409) {
        await refetchState().catch(() => undefined);
      }
    } else {
      setStatus(String(err), true);
    }
  }
}

function renderAll(): void {
  if (!app.summary || !app.state) {
    return;
  }
  el("summary").innerHTML = summaryHtml(app.summary);
  el("hierarchy").innerHTML = hierarchySvg(
    layoutHierarchy(app.state.hierarchy, app.state.trace.steps),
  );
  el("trace").innerHTML = traceTableHtml(
    app.state.trace.steps,
    app.state.cumulative_pct,
  );
  el<HTMLButtonElement>("undo").disabled = !app.state.can_undo;
  el<HTMLButtonElement>("redo").disabled = !app.state.can_redo;
  renderCandidates();
  void renderPlots();
}

function renderCandidates(): void {
  const container = el("candidates");
  if (!app.evaluation) {
    container.innerHTML = "<p>evaluate a split to see ranked candidates</p>";
    return;
  }
  app.evaluationRows = candidatePanel(app.evaluation);
  container.innerHTML = candidateTableHtml(app.evaluationRows, app.evaluation.base_pct);
  container.querySelectorAll<HTMLButtonElement>("button[data-commit]").forEach((button) => {
    button.addEventListener("click", () => {
      const row = app.evaluationRows[Number(button.dataset.commit)];
      const manual = button.dataset.manual === "true";
      if (
        manual &&
        !window.confirm(
          `${row.label} is not the top candidate; commit it as a manual override?`,
        )
      ) {
        return;
      }
      void guard(async () => {
        const pair = app.evaluationContext.find(
          (p) => `${p.num}/${p.den}` === row.label || `${p.den}/${p.num}` === row.label,
        );
        if (!pair || !app.summary) {
          throw new Error("candidate is not a committable node pair");
        }
        app.state = await api.commit(app.summary.id, pair.num, pair.den, manual);
        await reevaluateCurrent();
        renderAll();
      });
    });
  });
}

async function reevaluateCurrent(): Promise<void> {
  if (!app.summary || app.evaluationContext.length === 0) {
    return;
  }
  app.evaluation = await api.evaluate(app.summary.id, app.evaluationContext);
}

async function renderPlots(): Promise<void> {
  if (!app.summary || !app.state) {
    return;
  }
  const id = app.summary.id;
  const roots = app.state.hierarchy.nodes
    .map((n) => n.name)
    .filter(
      (name) => !app.state!.hierarchy.splits.some((s) => s.children.includes(name)),
    );

  const bar = el("plot-bar");
  const tern = el("plot-ternary");
  const bi = el("plot-biplot");
  if (roots.length >= 2) {
    try {
      bar.innerHTML = barChart(await api.amalgamated(id));
    } catch {
      bar.innerHTML = "<p class='hint'>bar view needs at least 2 root groups</p>";
    }
  } else {
    bar.innerHTML = "<p class='hint'>define root groups to see compositions</p>";
  }
  if (roots.length === 3) {
    try {
      tern.innerHTML = ternaryPlot(await api.ternary(id));
    } catch {
      tern.innerHTML = "<p class='hint'>ternary view unavailable</p>";
    }
  } else {
    tern.innerHTML =
      "<p class='hint' title='needs exactly 3 root groups'>ternary view needs exactly 3 root groups</p>";
  }
  const mode = el<HTMLSelectElement>("biplot-mode").value;
  try {
    if (mode === "pca-slr") {
      bi.innerHTML = biplot(await api.ordination(id, "pca-slr"));
    } else if (mode === "lra-roots") {
      bi.innerHTML = biplot(await api.ordination(id, "lra", "roots"));
    } else {
      bi.innerHTML = biplot(await api.ordination(id, "lra", "parts"));
    }
  } catch (err) {
    bi.innerHTML = `<p class='hint'>${
      err instanceof ApiError ? err.message : "biplot unavailable"
    }</p>`;
  }
}

function currentParentParts(parent: string): string[] {
  if (!app.summary || !app.state) {
    return [];
  }
  if (parent === "") {
    return app.summary.part_names;
  }
  return app.state.hierarchy.nodes.find((n) => n.name === parent)?.parts ?? [];
}

function refreshParentChoices(): void {
  if (!app.state) {
    return;
  }
  const select = el<HTMLSelectElement>("split-parent");
  const previous = select.value;
  const splitParents = new Set(app.state.hierarchy.splits.map((s) => s.parent));
  const options = ['<option value="">(new root groups over all parts)</option>'];
  for (const node of app.state.hierarchy.nodes) {
    if (!splitParents.has(node.name)) {
      options.push(`<option value="${node.name}">${node.name}</option>`);
    }
  }
  select.innerHTML = options.join("");
  select.value = [...select.options].some((o) => o.value === previous) ? previous : "";
}

function wireActions(): void {
  el<HTMLButtonElement>("load").addEventListener("click", () => {
    void guard(async () => {
      const file = el<HTMLInputElement>("csv-file").files?.[0];
      const text = file ? await file.text() : el<HTMLTextAreaElement>("csv-text").value;
      if (!text.trim()) {
        throw new Error("paste CSV text or choose a file first");
      }
      app.summary = await api.createSession(text);
      app.state = await api.state(app.summary.id);
      app.evaluation = null;
      app.evaluationContext = [];
      refreshParentChoices();
      renderAll();
    });
  });

  el<HTMLButtonElement>("evaluate-split").addEventListener("click", () => {
    void guard(async () => {
      if (!app.summary) {
        throw new Error("load a dataset first");
      }
      const parent = el<HTMLSelectElement>("split-parent").value;
      const draft = parseSplitDraft(el<HTMLTextAreaElement>("split-draft").value);
      if (draft.error) {
        throw new Error(draft.error);
      }
      const problem = validateSplit(draft.groups, currentParentParts(parent));
      if (problem) {
        throw new Error(problem); // inline validation, no network call
      }
      app.state = await api.split(
        app.summary.id,
        parent === "" ? null : parent,
        draft.groups,
      );
      app.evaluationContext = siblingPairs(draft.groups.map((g) => g.name));
      await reevaluateCurrent();
      refreshParentChoices();
      renderAll();
    });
  });

  el<HTMLButtonElement>("undo").addEventListener("click", () => {
    void guard(async () => {
      if (!app.summary) {
        return;
      }
      app.state = await api.undo(app.summary.id);
      await reevaluateCurrent().catch(() => {
        app.evaluation = null;
      });
      refreshParentChoices();
      renderAll();
    });
  });

  el<HTMLButtonElement>("redo").addEventListener("click", () => {
    void guard(async () => {
      if (!app.summary) {
        return;
      }
      app.state = await api.redo(app.summary.id);
      await reevaluateCurrent().catch(() => {
        app.evaluation = null;
      });
      refreshParentChoices();
      renderAll();
    });
  });

  el<HTMLButtonElement>("export").addEventListener("click", () => {
    void guard(async () => {
      if (!app.summary) {
        return;
      }
      const doc = await api.exportSession(app.summary.id);
      const blob = new Blob([JSON.stringify(doc, null, 2)], {
        type: "application/json",
      });
      const link = document.createElement("a");
      link.href = URL.createObjectURL(blob);
      link.download = `session-${app.summary.id}.json`;
      link.click();
      URL.revokeObjectURL(link.href);
    });
  });

  el<HTMLInputElement>("import-file").addEventListener("change", () => {
    void guard(async () => {
      const file = el<HTMLInputElement>("import-file").files?.[0];
      if (!file || !app.summary) {
        return;
      }
      const doc = JSON.parse(await file.text());
      app.state = await api.importHierarchy(
        app.summary.id,
        doc.hierarchy ?? doc,
      );
      app.evaluation = null;
      app.evaluationContext = [];
      refreshParentChoices();
      renderAll();
    });
  });

  el<HTMLSelectElement>("biplot-mode").addEventListener("change", () => {
    void renderPlots();
  });
}

wireActions();
setStatus("load a composition CSV to begin");
