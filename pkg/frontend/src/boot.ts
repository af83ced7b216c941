/** Browser entry point: construct the app against the real fetch and start. */

import { EditorApp } from "./main.js";

new EditorApp().start();
