// Browser bootstrap: wire the session to the DOM, a 250ms timer loop, and
// keyboard shortcuts (R / N). Configuration comes from query parameters;
// only the reviewer token is kept, in sessionStorage.

import { AuditClient } from './api.js'
import { renderSession } from './render.js'
import { Decision, ReviewSession } from './session.js'

function config() {
  const params = new URLSearchParams(window.location.search)
  return {
    baseUrl: params.get('service') ?? window.location.origin,
    auditId: params.get('audit') ?? '',
    reviewer: params.get('reviewer') ?? '',
    token: sessionStorage.getItem('audit-token') ?? undefined,
  }
}

function start() {
  const root = document.getElementById('app')
  if (!root) throw new Error('missing #app element')

  const settings = config()
  if (!settings.auditId || !settings.reviewer) {
    root.innerHTML =
      '<p>Open this page with ?audit=&lt;id&gt;&amp;reviewer=&lt;name&gt;' +
      ' (and optionally &amp;service=&lt;base-url&gt;).</p>'
    return
  }

  const session = new ReviewSession(new AuditClient(settings))

  const paint = () => {
    root.innerHTML = renderSession(session.view())
  }

  root.addEventListener('click', async (event) => {
    const target = event.target as HTMLElement
    if (target.dataset.decision) {
      await session.submit(target.dataset.decision as Decision)
      paint()
    } else if (target.id === 'retry') {
      await session.fetchNext()
      paint()
    } else if (target.id === 'token-save') {
      const input = document.getElementById('token-input') as HTMLInputElement
      sessionStorage.setItem('audit-token', input.value)
      window.location.reload()
    }
  })

  document.addEventListener('keydown', async (event) => {
    const key = event.key.toLowerCase()
    if (key === 'r' || key === 'n') {
      await session.submit(key === 'r' ? 'reportable' : 'non_reportable')
      paint()
    }
  })

  window.setInterval(() => {
    const timer = document.getElementById('timer')
    if (timer) timer.textContent = String(session.tick())
  }, 250)

  void session.fetchNext().then(paint)
}

document.addEventListener('DOMContentLoaded', start)
