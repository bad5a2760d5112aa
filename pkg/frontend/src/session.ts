// Review session state machine. All service traffic flows through here;
// the DOM layer only renders the current state and forwards clicks.

import { AuditClient, AuthError, NextItemBody, StatusBody } from './api.js'
import { Countdown } from './countdown.js'

export type Phase =
  | 'idle'
  | 'loading'
  | 'reviewing'
  | 'chunk_complete'
  | 'auth_required'
  | 'error'

export interface SessionView {
  phase: Phase
  item: NextItemBody | null
  countdownSeconds: number
  itemsCompleted: number
  chunkProgress: number | null // fraction of the active chunk, when known
  errorMessage: string | null
}

export type Decision = 'reportable' | 'non_reportable'

export class ReviewSession {
  private phase: Phase = 'idle'
  private item: NextItemBody | null = null
  private countdown: Countdown | null = null
  private submitting = false
  private itemsCompleted = 0
  private status: StatusBody | null = null
  private errorMessage: string | null = null

  constructor(
    private readonly client: AuditClient,
    private readonly now: () => number = () => Date.now(),
  ) {}

  view(): SessionView {
    return {
      phase: this.phase,
      item: this.item,
      countdownSeconds: this.countdown ? this.countdown.seconds : 0,
      itemsCompleted: this.itemsCompleted,
      chunkProgress: this.activeChunkProgress(),
      errorMessage: this.errorMessage,
    }
  }

  /** Lease the next item and restart the countdown. Network failures keep
   * the session intact behind a retry banner. */
  async fetchNext(): Promise<SessionView> {
    this.phase = 'loading'
    this.errorMessage = null
    try {
      const [result, status] = await Promise.all([
        this.client.nextItem(),
        this.client.status().catch(() => this.status),
      ])
      this.status = status
      if (result.kind === 'none') {
        this.item = null
        this.countdown = null
        this.phase = 'chunk_complete'
      } else {
        this.item = result.body
        this.countdown = new Countdown(result.body.per_item_seconds, this.now())
        this.phase = 'reviewing'
      }
    } catch (err) {
      if (err instanceof AuthError) {
        this.phase = 'auth_required'
        this.item = null
        this.countdown = null
      } else {
        this.phase = 'error'
        this.errorMessage = err instanceof Error ? err.message : String(err)
      }
    }
    return this.view()
  }

  /** Submit the decision for the displayed item with the measured review
   * time, then advance. Re-entry while a submission is in flight is a no-op,
   * so double clicks produce exactly one POST. A duplicate acknowledgment
   * (accepted=false) counts as success and advances as well. */
  async submit(decision: Decision): Promise<SessionView> {
    if (this.phase !== 'reviewing' || !this.item || !this.countdown) {
      return this.view()
    }
    if (this.submitting) return this.view()
    this.submitting = true
    const reviewSeconds =
      Math.round(this.countdown.elapsedSeconds(this.now()) * 100) / 100
    try {
      await this.client.submitDecision(this.item.item_id, decision, reviewSeconds)
      this.itemsCompleted += 1
      this.item = null
      this.countdown = null
      this.submitting = false
      return await this.fetchNext()
    } catch (err) {
      this.submitting = false
      if (err instanceof AuthError) {
        this.phase = 'auth_required'
      } else {
        // The item stays on screen; the reviewer may retry the submission.
        this.errorMessage = err instanceof Error ? err.message : String(err)
      }
      return this.view()
    }
  }

  tick(): number {
    return this.countdown ? this.countdown.tick(this.now()) : 0
  }

  private activeChunkProgress(): number | null {
    if (!this.status || this.status.chunk_sizes.length === 0) return null
    const { chunk_sizes, chunk_done } = this.status
    for (let i = 0; i < chunk_sizes.length; i += 1) {
      if (chunk_done[i] < chunk_sizes[i]) {
        return chunk_sizes[i] === 0 ? 1 : chunk_done[i] / chunk_sizes[i]
      }
    }
    return 1
  }
}
