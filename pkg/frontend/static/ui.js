/** DOM rendering for the study screens. */
import { captureKeypress, waitForKey } from "./keys.js";
/**
 * Build a StudyView that renders into `root` and listens for keys on
 * `keyTarget` (normally `window`).  All server-provided text is inserted
 * via textContent, never as markup.
 */
export function createDomView(root, keyTarget) {
    const doc = root.ownerDocument;
    function clear() {
        root.textContent = "";
    }
    function screen(className) {
        clear();
        const el = doc.createElement("div");
        el.className = `screen ${className}`;
        root.appendChild(el);
        return el;
    }
    function para(parent, className, text) {
        const p = doc.createElement("p");
        p.className = className;
        p.textContent = text;
        parent.appendChild(p);
        return p;
    }
    return {
        async showInstructions(text) {
            const el = screen("instructions");
            // The mapping differs between sessions, so the text must reach the
            // participant exactly as the server wrote it.
            for (const line of text.split("\n")) {
                para(el, "instructions-line", line);
            }
            para(el, "hint", "Press the space bar to begin.");
            await waitForKey(keyTarget, " ");
        },
        showTrial(trial) {
            const el = screen("trial");
            para(el, "progress", `Trial ${trial.trial_index + 1} of ${trial.n_trials}`);
            for (const statement of trial.statements) {
                para(el, "statement", statement);
            }
            para(el, "question", trial.question);
            para(el, "hint", "F or J");
        },
        awaitAnswer() {
            return captureKeypress(keyTarget).result;
        },
        showBlank() {
            clear();
        },
        showDone(nTrials, answered) {
            const el = screen("done");
            para(el, "headline", "All done — thank you!");
            para(el, "detail", `You answered ${answered} of ${nTrials} questions.`);
            para(el, "detail", "You can close this window now.");
        },
        showError(message) {
            const el = screen("error");
            para(el, "headline", "Something went wrong.");
            para(el, "detail", message);
            para(el, "detail", "Please tell the experimenter.");
        },
    };
}
