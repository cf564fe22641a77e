/**
 * Console entry point: login form, request board, detail panel, scatter map.
 * Polls the service every 2 seconds while signed in.
 */

import { ApiClient, ApiError } from "./api";
import { applyUpdate, detailFields, toBoardRows } from "./board";
import { dirAttribute, t, type UiLang } from "./i18n";
import { buildMarkers, placeMarkers } from "./map";
import type { RequestView, UnitView } from "./types";

const POLL_INTERVAL_MS = 2000;
const MAP_VIEWPORT = { width: 480, height: 360, padding: 20 };

interface AppState {
  lang: UiLang;
  requests: RequestView[];
  units: UnitView[];
  selectedId: string | null;
}

export function startApp(
  root: HTMLElement,
  client: ApiClient = new ApiClient(""),
): void {
  const state: AppState = {
    lang: (localStorage.getItem("pregcare.lang") as UiLang) || "en",
    requests: [],
    units: [],
    selectedId: null,
  };
  let timer: number | undefined;

  function render(): void {
    document.documentElement.dir = dirAttribute(state.lang);
    root.replaceChildren();
    root.appendChild(header());
    if (!client.authenticated) {
      root.appendChild(loginForm());
      return;
    }
    root.appendChild(board());
    root.appendChild(mapPane());
    const selected = state.requests.find(
      (r) => r.request_id === state.selectedId,
    );
    if (selected) root.appendChild(detailPane(selected));
  }

  function header(): HTMLElement {
    const el = document.createElement("header");
    const title = document.createElement("h1");
    title.textContent = t(state.lang, "app.title");
    el.appendChild(title);
    const picker = document.createElement("select");
    for (const lang of ["en", "ku", "ar"] as const) {
      const option = document.createElement("option");
      option.value = lang;
      option.textContent = lang;
      option.selected = lang === state.lang;
      picker.appendChild(option);
    }
    picker.addEventListener("change", () => {
      state.lang = picker.value as UiLang;
      localStorage.setItem("pregcare.lang", state.lang);
      render();
    });
    el.appendChild(picker);
    return el;
  }

  function loginForm(): HTMLElement {
    const form = document.createElement("form");
    const user = document.createElement("input");
    user.placeholder = t(state.lang, "login.username");
    const pass = document.createElement("input");
    pass.type = "password";
    pass.placeholder = t(state.lang, "login.password");
    const submit = document.createElement("button");
    submit.textContent = t(state.lang, "login.submit");
    const error = document.createElement("p");
    error.className = "error";
    form.append(user, pass, submit, error);
    form.addEventListener("submit", async (ev) => {
      ev.preventDefault();
      try {
        await client.login(user.value, pass.value);
        await refresh();
        timer = window.setInterval(refresh, POLL_INTERVAL_MS);
      } catch {
        error.textContent = t(state.lang, "login.failed");
      }
    });
    return form;
  }

  function board(): HTMLElement {
    const rows = toBoardRows(state.requests, state.lang);
    const table = document.createElement("table");
    table.className = "board";
    const head = table.createTHead().insertRow();
    for (const key of [
      "board.patient",
      "board.hospital",
      "board.state",
      "board.unit",
      "board.requested",
    ] as const) {
      const th = document.createElement("th");
      th.textContent = t(state.lang, key);
      head.appendChild(th);
    }
    const body = table.createTBody();
    if (rows.length === 0) {
      const cell = body.insertRow().insertCell();
      cell.colSpan = 5;
      cell.textContent = t(state.lang, "board.empty");
    }
    for (const row of rows) {
      const tr = body.insertRow();
      tr.dataset.requestId = row.requestId;
      for (const value of [
        row.patientName,
        row.hospitalName,
        row.stateLabel,
        row.unitId,
        row.requestedAt,
      ]) {
        tr.insertCell().textContent = value;
      }
      tr.addEventListener("click", () => {
        state.selectedId = row.requestId;
        render();
      });
    }
    return table;
  }

  function mapPane(): HTMLElement {
    const pane = document.createElement("div");
    pane.className = "map";
    pane.style.width = `${MAP_VIEWPORT.width}px`;
    pane.style.height = `${MAP_VIEWPORT.height}px`;
    const placed = placeMarkers(
      buildMarkers(state.requests, state.units),
      MAP_VIEWPORT,
    );
    for (const marker of placed) {
      const dot = document.createElement("div");
      dot.className = `marker marker-${marker.kind}`;
      dot.style.left = `${marker.x}px`;
      dot.style.top = `${marker.y}px`;
      dot.title = marker.label;
      pane.appendChild(dot);
    }
    return pane;
  }

  function detailPane(view: RequestView): HTMLElement {
    const pane = document.createElement("section");
    pane.className = "detail";
    const title = document.createElement("h2");
    title.textContent = t(state.lang, "detail.title");
    pane.appendChild(title);
    const list = document.createElement("dl");
    for (const field of detailFields(view, state.lang)) {
      const dt = document.createElement("dt");
      dt.textContent = field.label;
      const dd = document.createElement("dd");
      dd.textContent = field.value;
      list.append(dt, dd);
    }
    pane.appendChild(list);
    pane.appendChild(actions(view));
    return pane;
  }

  function actions(view: RequestView): HTMLElement {
    const bar = document.createElement("div");
    bar.className = "actions";
    if (view.state === "located") {
      const select = document.createElement("select");
      for (const unit of state.units) {
        if (unit.status !== "available") continue;
        const option = document.createElement("option");
        option.value = unit.unit_id;
        option.textContent = `${unit.unit_id} (${unit.kind})`;
        select.appendChild(option);
      }
      const assign = document.createElement("button");
      assign.textContent = t(state.lang, "action.assign");
      assign.addEventListener("click", () =>
        act(client.assign(view.request_id, select.value)),
      );
      bar.append(select, assign);
    }
    if (view.state === "dispatched") {
      const complete = document.createElement("button");
      complete.textContent = t(state.lang, "action.complete");
      complete.addEventListener("click", () =>
        act(client.complete(view.request_id)),
      );
      bar.appendChild(complete);
    }
    const cancel = document.createElement("button");
    cancel.textContent = t(state.lang, "action.cancel");
    cancel.addEventListener("click", () => act(client.cancel(view.request_id)));
    bar.appendChild(cancel);
    return bar;
  }

  async function act(call: Promise<RequestView>): Promise<void> {
    try {
      const updated = await call;
      state.requests = applyUpdate(state.requests, updated);
      render();
    } catch (err) {
      if (err instanceof ApiError && err.status === 401) {
        stopPolling();
        render();
        return;
      }
      console.error(err);
      await refresh();
    }
  }

  async function refresh(): Promise<void> {
    try {
      const [requests, units] = await Promise.all([
        client.listRequests(["received", "located", "dispatched"]),
        client.listUnits(),
      ]);
      state.requests = requests.requests;
      state.units = units.units;
      render();
    } catch (err) {
      if (err instanceof ApiError && err.status === 401) {
        stopPolling();
        render();
      }
    }
  }

  function stopPolling(): void {
    if (timer !== undefined) window.clearInterval(timer);
    timer = undefined;
  }

  render();
}

if (typeof document !== "undefined") {
  const root = document.getElementById("app");
  if (root) startApp(root);
}
