/** F/J keypress capture with a monotonic reaction-time clock. */
/**
 * Resolve with the first F or J press after the call.
 *
 * The clock starts immediately, so call this the moment the trial is
 * painted.  Auto-repeat events and any other key are ignored; once a
 * press is accepted the listener is removed, so a second press (the
 * participant changing their mind) has no effect.
 */
export function captureKeypress(target, opts = {}) {
    const now = opts.now ?? (() => performance.now());
    const start = now();
    let settled = false;
    let resolveFn;
    const result = new Promise((resolve) => {
        resolveFn = resolve;
    });
    const handler = (event) => {
        const keyboard = event;
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
        resolveFn({ key: key, rtMs: Math.max(0, Math.round(now() - start)) });
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
export function waitForKey(target, key) {
    return new Promise((resolve) => {
        const wanted = key.toLowerCase();
        const handler = (event) => {
            const keyboard = event;
            if (typeof keyboard.key === "string" && keyboard.key.toLowerCase() === wanted) {
                target.removeEventListener("keydown", handler);
                resolve();
            }
        };
        target.addEventListener("keydown", handler);
    });
}
