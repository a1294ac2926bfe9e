/** The participant-facing session loop, independent of any rendering. */

import { ApiError, NextPayload, SessionInfo, StudyKey, SubmitResult, TrialPayload } from "./api.js";
import type { CapturedPress } from "./keys.js";

/** The slice of the HTTP client the loop needs (StudyApi satisfies it). */
export interface SessionApi {
  createSession(): Promise<SessionInfo>;
  nextTrial(sessionId: string): Promise<NextPayload>;
  submitResponse(
    sessionId: string,
    itemId: string,
    key: StudyKey,
    rtMs: number,
  ): Promise<SubmitResult>;
}

export interface StudyView {
  /** Show the instruction text verbatim; resolve when the participant continues. */
  showInstructions(text: string): Promise<void>;
  showTrial(trial: TrialPayload): void;
  /** Start listening for an answer; the reaction clock starts here. */
  awaitAnswer(): Promise<CapturedPress>;
  showBlank(): void;
  showDone(nTrials: number, answered: number): void;
  showError(message: string): void;
}

export interface SessionLoopOptions {
  /** Blank-screen pause between trials. */
  interTrialMs?: number;
  sleep?: (ms: number) => Promise<void>;
}

export interface SessionOutcome {
  sessionId: string;
  answered: number;
}

const defaultSleep = (ms: number) => new Promise<void>((r) => setTimeout(r, ms));

/** How many times one trial may bounce (bad_rt or conflict) before giving up. */
const MAX_TRIAL_BOUNCES = 3;

export async function runSessionLoop(
  api: SessionApi,
  view: StudyView,
  opts: SessionLoopOptions = {},
): Promise<SessionOutcome> {
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
      const outcome = await api.submitResponse(
        session.session_id,
        next.item_id,
        press.key,
        press.rtMs,
      );
      if (outcome.recorded) {
        answered += 1;
        bounces = 0;
      }
    } catch (err) {
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
