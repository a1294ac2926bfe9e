/** The participant-facing session loop, independent of any rendering. */
import { ApiError } from "./api.js";
const defaultSleep = (ms) => new Promise((r) => setTimeout(r, ms));
/** How many times one trial may bounce (bad_rt or conflict) before giving up. */
const MAX_TRIAL_BOUNCES = 3;
export async function runSessionLoop(api, view, opts = {}) {
    const interTrialMs = opts.interTrialMs ?? 500;
    const sleep = opts.sleep ?? defaultSleep;
    const session = await api.createSession();
    await view.showInstructions(session.instructions);
    let answered = 0;
    let bounces = 0;
    for (;;) {
        const next = await api.nextTrial(session.session_id);
        if (next.done) {
            break;
        }
        view.showTrial(next);
        const press = await view.awaitAnswer();
        try {
            const outcome = await api.submitResponse(session.session_id, next.item_id, press.key, press.rtMs);
            if (outcome.recorded) {
                answered += 1;
                bounces = 0;
            }
        }
        catch (err) {
            if (err instanceof ApiError && (err.code === "bad_rt" || err.code === "conflict")) {
                // bad_rt: an anticipatory or implausibly slow press — re-run the
                // trial.  conflict: the server is ahead of us — refetch and realign.
                // Neither loses the trial; the server's cursor is authoritative.
                bounces += 1;
                if (bounces > MAX_TRIAL_BOUNCES) {
                    view.showError(`trial ${next.trial_index} failed repeatedly: ${err.message}`);
                    throw err;
                }
                continue;
            }
            view.showError(err instanceof Error ? err.message : String(err));
            throw err;
        }
        view.showBlank();
        await sleep(interTrialMs);
    }
    view.showDone(session.n_trials, answered);
    return { sessionId: session.session_id, answered };
}
