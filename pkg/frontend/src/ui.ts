/** DOM rendering for the study screens. */

import type { TrialPayload } from "./api.js";
import { captureKeypress, waitForKey, CapturedPress } from "./keys.js";
import type { StudyView } from "./session.js";

interface KeyTarget {
  addEventListener(type: string, listener: (event: Event) => void): void;
  removeEventListener(type: string, listener: (event: Event) => void): void;
}

/**
 * Build a StudyView that renders into `root` and listens for keys on
 * `keyTarget` (normally `window`).  All server-provided text is inserted
 * via textContent, never as markup.
 */
export function createDomView(root: HTMLElement, keyTarget: KeyTarget): StudyView {
  const doc = root.ownerDocument;

  function clear(): void {
    root.textContent = "";
  }

  function screen(className: string): HTMLElement {
    clear();
    const el = doc.createElement("div");
    el.className = `screen ${className}`;
    root.appendChild(el);
    return el;
  }

  function para(parent: HTMLElement, className: string, text: string): HTMLElement {
    const p = doc.createElement("p");
    p.className = className;
    p.textContent = text;
    parent.appendChild(p);
    return p;
  }

  return {
    async showInstructions(text: string): Promise<void> {
      const el = screen("instructions");
      // The mapping differs between sessions, so the text must reach the
      // participant exactly as the server wrote it.
      for (const line of text.split("\n")) {
        para(el, "instructions-line", line);
      }
      para(el, "hint", "Press the space bar to begin.");
      await waitForKey(keyTarget, " ");
    },

    showTrial(trial: TrialPayload): void {
      const el = screen("trial");
      para(el, "progress", `Trial ${trial.trial_index + 1} of ${trial.n_trials}`);
      for (const statement of trial.statements) {
        para(el, "statement", statement);
      }
      para(el, "question", trial.question);
      para(el, "hint", "F or J");
    },

    awaitAnswer(): Promise<CapturedPress> {
      return captureKeypress(keyTarget).result;
    },

    showBlank(): void {
      clear();
    },

    showDone(nTrials: number, answered: number): void {
      const el = screen("done");
      para(el, "headline", "All done — thank you!");
      para(el, "detail", `You answered ${answered} of ${nTrials} questions.`);
      para(el, "detail", "You can close this window now.");
    },

    showError(message: string): void {
      const el = screen("error");
      para(el, "headline", "Something went wrong.");
      para(el, "detail", message);
      para(el, "detail", "Please tell the experimenter.");
    },
  };
}
