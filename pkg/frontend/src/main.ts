import { LabelingApp } from "./app.js";

const root = document.getElementById("app");
if (root) {
  const app = new LabelingApp(root);
  void app.init();
}
