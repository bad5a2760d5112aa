// Typed client for the audit service's /v1 endpoints.

export interface ClientConfig {
  baseUrl: string
  auditId: string
  reviewer: string
  token?: string
}

export interface BlindedItem {
  item_id: string
  audit_id: string
  doc_id: string
  text: string
  chunk_index: number
}

export interface NextItemBody extends BlindedItem {
  lease_expires_at: string
  per_item_seconds: number
}

export type NextItemResult =
  | { kind: 'item'; body: NextItemBody }
  | { kind: 'none' }

export interface SubmitResult {
  accepted: boolean
  timed_out: boolean
}

export interface StatusBody {
  audit_id: string
  chunk_sizes: number[]
  chunk_done: number[]
  chunks_completed: number
  decisions_by_kind: Record<string, number>
}

export class AuthError extends Error {}

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message)
  }
}

type FetchLike = typeof fetch

export class AuditClient {
  private readonly fetchImpl: FetchLike

  constructor(readonly config: ClientConfig, fetchImpl?: FetchLike) {
    this.fetchImpl = fetchImpl ?? fetch.bind(globalThis)
  }

  private headers(): Record<string, string> {
    const headers: Record<string, string> = { 'Content-Type': 'application/json' }
    if (this.config.token) headers['X-Audit-Token'] = this.config.token
    return headers
  }

  private url(path: string): string {
    const base = this.config.baseUrl.replace(/\/$/, '')
    return `${base}/v1/audits/${encodeURIComponent(this.config.auditId)}${path}`
  }

  private async checked(response: Response): Promise<Response> {
    if (response.status === 401) throw new AuthError('token rejected')
    if (!response.ok && response.status !== 204) {
      const text = await response.text()
      throw new ApiError(response.status, text || `${response.status}`)
    }
    return response
  }

  async nextItem(): Promise<NextItemResult> {
    const reviewer = encodeURIComponent(this.config.reviewer)
    const response = await this.checked(
      await this.fetchImpl(this.url(`/next?reviewer=${reviewer}`), {
        headers: this.headers(),
      }),
    )
    if (response.status === 204) return { kind: 'none' }
    return { kind: 'item', body: (await response.json()) as NextItemBody }
  }

  async submitDecision(
    itemId: string,
    decision: 'reportable' | 'non_reportable',
    reviewSeconds: number,
  ): Promise<SubmitResult> {
    const response = await this.checked(
      await this.fetchImpl(this.url('/decisions'), {
        method: 'POST',
        headers: this.headers(),
        body: JSON.stringify({
          item_id: itemId,
          reviewer: this.config.reviewer,
          label: decision,
          review_seconds: reviewSeconds,
        }),
      }),
    )
    return (await response.json()) as SubmitResult
  }

  async status(): Promise<StatusBody> {
    const response = await this.checked(
      await this.fetchImpl(this.url('/status'), { headers: this.headers() }),
    )
    return (await response.json()) as StatusBody
  }
}
