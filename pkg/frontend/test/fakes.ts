// A scripted stand-in for the audit service, driven by the recorded
// fixtures. Counts every request so tests can assert wire behavior.

import nextItems from './fixtures/next_items.json'
import statusBody from './fixtures/status.json'
import submitAccepted from './fixtures/submit_accepted.json'
import submitDuplicate from './fixtures/submit_duplicate.json'

import type { NextItemBody, StatusBody } from '../src/api.js'

export const FIXTURE_ITEMS = nextItems as NextItemBody[]
export const FIXTURE_STATUS = statusBody as StatusBody
export const SUBMIT_ACCEPTED = submitAccepted as { accepted: boolean; timed_out: boolean }
export const SUBMIT_DUPLICATE = submitDuplicate as { accepted: boolean; timed_out: boolean }

function json(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'Content-Type': 'application/json' },
  })
}

export interface ScriptedCall {
  url: string
  method: string
  body: unknown
}

export class FakeService {
  calls: ScriptedCall[] = []
  queue: NextItemBody[]
  submitResponses: Array<{ accepted: boolean; timed_out: boolean }> = []
  failNextWith: Error | null = null
  unauthorized = false
  submitDelayMs = 0

  constructor(queue: NextItemBody[] = FIXTURE_ITEMS) {
    this.queue = [...queue]
  }

  fetch = async (input: string | URL | Request, init?: RequestInit): Promise<Response> => {
    const url = String(input)
    const method = init?.method ?? 'GET'
    const body = init?.body ? JSON.parse(String(init.body)) : null
    this.calls.push({ url, method, body })

    if (this.failNextWith) {
      const failure = this.failNextWith
      this.failNextWith = null
      throw failure
    }
    if (this.unauthorized) return json({ error: 'invalid or missing token' }, 401)

    if (url.includes('/next')) {
      const item = this.queue.shift()
      return item ? json(item) : new Response(null, { status: 204 })
    }
    if (url.endsWith('/decisions')) {
      if (this.submitDelayMs > 0) {
        await new Promise((resolve) => setTimeout(resolve, this.submitDelayMs))
      }
      return json(this.submitResponses.shift() ?? SUBMIT_ACCEPTED)
    }
    if (url.endsWith('/status')) return json(FIXTURE_STATUS)
    return json({ error: `unexpected url ${url}` }, 500)
  }

  posts(): ScriptedCall[] {
    return this.calls.filter((c) => c.method === 'POST')
  }
}
