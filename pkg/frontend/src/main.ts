import { StudyApi } from "./api.js";
import { runSessionLoop } from "./session.js";
import { createDomView } from "./ui.js";

const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app container");
}
const view = createDomView(root, window);
const api = new StudyApi(window.location.origin);

runSessionLoop(api, view).catch((err) => {
  console.error(err);
  view.showError(err instanceof Error ? err.message : String(err));
});
