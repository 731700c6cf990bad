/** Console bootstrap: config form wiring plus the render loop. */

import { DpiDocument, SessionApi, SessionConfigBody } from "./api.js";
import { render } from "./render.js";
import { ConsoleState, SessionController } from "./state.js";

export interface ConsoleHandles {
  controller: SessionController;
  start: () => Promise<void>;
}

export function mountConsole(
  root: HTMLElement,
  form: HTMLElement,
  api: SessionApi,
): ConsoleHandles {
  const controller: SessionController = new SessionController(api, (state: ConsoleState) => {
    render(root, state, {
      onAnswer: (verdict) => void controller.answer(verdict),
      onTogglePretty: () => controller.togglePretty(),
    });
  });

  const start = async (): Promise<void> => {
    const dpiField = form.querySelector<HTMLTextAreaElement>("[name=dpi]");
    const qsm = form.querySelector<HTMLSelectElement>("[name=qsm]");
    const qcm = form.querySelector<HTMLSelectElement>("[name=qcm]");
    const tm = form.querySelector<HTMLInputElement>("[name=tm]");
    const enhance = form.querySelector<HTMLInputElement>("[name=enhance]");
    if (!dpiField) {
      return;
    }
    let dpi: DpiDocument;
    try {
      dpi = JSON.parse(dpiField.value) as DpiDocument;
    } catch (error) {
      render(root, controllerErrorState(controller, `invalid instance JSON: ${error}`), {
        onAnswer: () => undefined,
        onTogglePretty: () => controller.togglePretty(),
      });
      return;
    }
    const config: SessionConfigBody = {
      qsm: (qsm?.value as SessionConfigBody["qsm"]) ?? "ent",
      qcm: (qcm?.value as SessionConfigBody["qcm"]) ?? "card",
      tm: tm ? Number(tm.value) : 0,
      enhance: enhance?.checked ?? false,
      leading: 10,
    };
    await controller.start(dpi, config);
  };

  form.querySelector("[name=start]")?.addEventListener("click", () => void start());
  return { controller, start };
}

function controllerErrorState(controller: SessionController, message: string): ConsoleState {
  return { ...controller.snapshot(), error: message };
}

declare global {
  interface Window {
    qdiagConsole?: ConsoleHandles;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  const root = document.getElementById("app") as HTMLElement;
  const form = document.getElementById("config") as HTMLElement;
  const api = new SessionApi("");
  window.qdiagConsole = mountConsole(root, form, api);
}
