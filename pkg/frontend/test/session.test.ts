import { describe, expect, it } from 'vitest'

import { AuditClient } from '../src/api.js'
import { ReviewSession } from '../src/session.js'
import { FakeService, FIXTURE_ITEMS, SUBMIT_DUPLICATE } from './fakes.js'

const CONFIG = {
  baseUrl: 'http://audit.local',
  auditId: 'audit-0001',
  reviewer: 'sme-alpha',
}

function makeSession(service: FakeService, clock?: () => number) {
  const client = new AuditClient(CONFIG, service.fetch)
  let t = 0
  const now = clock ?? (() => (t += 1000))
  return new ReviewSession(client, now)
}

describe('ReviewSession', () => {
  it('fetches a leased item and resets the countdown to the budget', async () => {
    const service = new FakeService()
    const session = makeSession(service, () => 5_000)
    const view = await session.fetchNext()
    expect(view.phase).toBe('reviewing')
    expect(view.item?.item_id).toBe(FIXTURE_ITEMS[0].item_id)
    expect(view.countdownSeconds).toBe(60)
  })

  it('shows the completion screen on 204', async () => {
    const service = new FakeService([])
    const session = makeSession(service)
    const view = await session.fetchNext()
    expect(view.phase).toBe('chunk_complete')
    expect(view.item).toBeNull()
  })

  it('asks for a token again when the service says 401', async () => {
    const service = new FakeService()
    service.unauthorized = true
    const session = makeSession(service)
    const view = await session.fetchNext()
    expect(view.phase).toBe('auth_required')
  })

  it('keeps session state behind a retry banner on network failure', async () => {
    const service = new FakeService()
    const session = makeSession(service)
    await session.fetchNext()
    await session.submit('reportable')
    expect(session.view().itemsCompleted).toBe(1)

    service.failNextWith = new TypeError('fetch failed')
    // A failed submit leaves the item on screen and nothing is lost.
    const failed = await session.submit('non_reportable')
    expect(failed.errorMessage).not.toBeNull()
    expect(failed.itemsCompleted).toBe(1)
    expect(failed.item).not.toBeNull()

    const retried = await session.submit('non_reportable')
    expect(retried.itemsCompleted).toBe(2)
  })

  it('shows a generic banner on the review screen after a failed submit', async () => {
    const { renderSession } = await import('../src/render.js')
    const service = new FakeService()
    const session = makeSession(service)
    await session.fetchNext()
    service.failNextWith = new TypeError('fetch failed: label backend down')
    const failed = await session.submit('reportable')
    const markup = renderSession(failed)
    expect(markup).toContain('not saved')
    expect(markup).not.toContain('backend down') // raw errors stay off this screen
  })

  it('sends the measured review time with the decision', async () => {
    const service = new FakeService()
    let t = 10_000
    const session = makeSession(service, () => t)
    await session.fetchNext()
    t += 42_000 // the reviewer thinks for 42 seconds
    await session.submit('reportable')
    const post = service.posts()[0]
    expect(post.url).toContain('/decisions')
    expect((post.body as { review_seconds: number }).review_seconds).toBeCloseTo(42)
    expect((post.body as { label: string }).label).toBe('reportable')
  })

  it('double submission produces exactly one POST', async () => {
    const service = new FakeService()
    service.submitDelayMs = 20
    const session = makeSession(service)
    await session.fetchNext()
    await Promise.all([session.submit('reportable'), session.submit('reportable')])
    expect(service.posts()).toHaveLength(1)
    expect(session.view().itemsCompleted).toBe(1)
  })

  it('treats a duplicate acknowledgment as success and advances', async () => {
    const service = new FakeService()
    service.submitResponses = [SUBMIT_DUPLICATE]
    const session = makeSession(service)
    await session.fetchNext()
    const view = await session.submit('non_reportable')
    expect(view.itemsCompleted).toBe(1)
    expect(view.phase).toBe('reviewing') // already on the next item
  })

  it('keeps an expired item submittable (service flags it, we do not drop it)', async () => {
    const service = new FakeService()
    let t = 0
    const session = makeSession(service, () => t)
    await session.fetchNext()
    t = 90_000 // well past the 60s budget
    expect(session.tick()).toBe(0)
    expect(session.view().phase).toBe('reviewing')
    await session.submit('reportable')
    const post = service.posts()[0]
    expect((post.body as { review_seconds: number }).review_seconds).toBeCloseTo(90)
    expect(session.view().itemsCompleted).toBe(1)
  })

  it('reports chunk progress from the status endpoint', async () => {
    const service = new FakeService()
    const session = makeSession(service)
    const view = await session.fetchNext()
    // The recorded status fixture has one decision in the first 21-item chunk.
    expect(view.chunkProgress).toBeCloseTo(1 / 21)
  })
})
