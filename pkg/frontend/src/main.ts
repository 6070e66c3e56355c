/** Browser entry point: mounts the controller onto #app and translates DOM
 * events into controller calls. All rendering goes through innerHTML with the
 * controller's HTML; this file is the only code that touches the DOM. */

import "./styles.css";
import { ApiClient } from "./api";
import { CurationController } from "./controller";

const root = document.getElementById("app");
if (root === null) {
  throw new Error("missing #app mount point");
}

const api = new ApiClient((input, init) => fetch(input, init));
const controller = new CurationController(api, (html) => {
  root.innerHTML = html;
});

function downloadFile(filename: string, content: string): void {
  const blob = new Blob([content], { type: "application/x-ndjson" });
  const url = URL.createObjectURL(blob);
  const anchor = document.createElement("a");
  anchor.href = url;
  anchor.download = filename;
  document.body.appendChild(anchor);
  anchor.click();
  anchor.remove();
  URL.revokeObjectURL(url);
}

root.addEventListener("click", (event) => {
  const target = (event.target as HTMLElement).closest<HTMLElement>("[data-action]");
  if (target === null) {
    return;
  }
  const action = target.dataset["action"];
  const argument = target.dataset["target"] ?? "";
  switch (action) {
    case "submit":
      void controller.submit();
      break;
    case "select":
      void controller.selectAssay(argument);
      break;
    case "delete":
      void controller.deleteStatement(argument);
      break;
    case "retry":
      void controller.retry();
      break;
    case "export":
      void controller.exportCurated().then(({ filename, content }) => {
        downloadFile(filename, content);
      });
      break;
    default:
      break;
  }
});

root.addEventListener("input", (event) => {
  const target = event.target as HTMLElement;
  if (target.matches('[data-role="draft"]')) {
    // Mutate state without re-rendering mid-keystroke (re-render would drop
    // focus); just mirror the enable/disable rule onto the submit button.
    controller.state.draft = (target as HTMLTextAreaElement).value;
    const submit = root.querySelector<HTMLButtonElement>('[data-role="submit"]');
    if (submit !== null) {
      submit.disabled =
        controller.state.draft.trim() === "" || controller.state.submitting;
    }
  }
});

root.addEventListener("change", (event) => {
  const target = event.target as HTMLElement;
  if (target.matches('[data-role="threshold"]')) {
    controller.setThreshold(Number((target as HTMLSelectElement).value));
  }
});

root.addEventListener("dragover", (event) => {
  event.preventDefault();
});

root.addEventListener("drop", (event) => {
  event.preventDefault();
  const file = event.dataTransfer?.files?.[0];
  if (file !== undefined) {
    void file.text().then((text) => {
      controller.setDraft(text);
    });
  }
});

void controller.init();
