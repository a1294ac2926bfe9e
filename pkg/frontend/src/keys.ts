/** F/J keypress capture with a monotonic reaction-time clock. */

import type { StudyKey } from "./api.js";

export interface CapturedPress {
  key: StudyKey;
  /** Milliseconds from capture start to the first accepted press. */
  rtMs: number;
}

interface ListenerTarget {
  addEventListener(type: string, listener: (event: Event) => void): void;
  removeEventListener(type: string, listener: (event: Event) => void): void;
}

export interface KeyCapture {
  result: Promise<CapturedPress>;
  /** Stop listening; the promise stays pending forever. */
  cancel(): void;
}

/**
 * Resolve with the first F or J press after the call.
 *
 * The clock starts immediately, so call this the moment the trial is
 * painted.  Auto-repeat events and any other key are ignored; once a
 * press is accepted the listener is removed, so a second press (the
 * participant changing their mind) has no effect.
 */
export function captureKeypress(
  target: ListenerTarget,
  opts: { now?: () => number } = {},
): KeyCapture {
  const now = opts.now ?? (() => performance.now());
  const start = now();
  let settled = false;
  let resolveFn: (press: CapturedPress) => void;
  const result = new Promise<CapturedPress>((resolve) => {
    resolveFn = resolve;
  });

  const handler = (event: Event) => {
    const keyboard = event as { key?: unknown; repeat?: boolean };
    if (keyboard.repeat) {
      return;
    }
    if (typeof keyboard.key !== "string") {
      return;
    }
    const key = keyboard.key.toUpperCase();
    if (key !== "F" && key !== "J") {
      return;
    }
    if (settled) {
      return;
    }
    settled = true;
    target.removeEventListener("keydown", handler);
    resolveFn({ key: key as StudyKey, rtMs: Math.max(0, Math.round(now() - start)) });
  };

  target.addEventListener("keydown", handler);
  return {
    result,
    cancel() {
      settled = true;
      target.removeEventListener("keydown", handler);
    },
  };
}

/** Resolve on the first press of `key` (used by the instructions screen). */
export function waitForKey(target: ListenerTarget, key: string): Promise<void> {
  return new Promise((resolve) => {
    const wanted = key.toLowerCase();
    const handler = (event: Event) => {
      const keyboard = event as { key?: unknown };
      if (typeof keyboard.key === "string" && keyboard.key.toLowerCase() === wanted) {
        target.removeEventListener("keydown", handler);
        resolve();
      }
    };
    target.addEventListener("keydown", handler);
  });
}
