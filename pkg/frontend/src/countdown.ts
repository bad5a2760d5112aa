// Review countdown. The displayed value starts at the service-provided
// budget and can only move down, whatever the wall clock does; reaching
// zero does not lock the item (late submissions are the service's call to
// flag, not ours to discard).

export class Countdown {
  private readonly startedAt: number
  private shown: number

  constructor(readonly budgetSeconds: number, now: number) {
    this.startedAt = now
    this.shown = budgetSeconds
  }

  /** Recompute from the clock; monotone non-increasing by construction. */
  tick(now: number): number {
    const elapsed = Math.max(0, (now - this.startedAt) / 1000)
    const remaining = Math.max(0, Math.ceil(this.budgetSeconds - elapsed))
    if (remaining < this.shown) this.shown = remaining
    return this.shown
  }

  get seconds(): number {
    return this.shown
  }

  get expired(): boolean {
    return this.shown <= 0
  }

  elapsedSeconds(now: number): number {
    return Math.max(0, (now - this.startedAt) / 1000)
  }
}
