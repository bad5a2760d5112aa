// Pure view rendering: session state in, HTML string out. The document text
// is always escaped, and decision vocabulary appears only inside the two
// decision buttons so blinding checks can strip them and scan the rest.

import { SessionView } from './session.js'

export function escapeHtml(raw: string): string {
  return raw
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;')
    .replace(/'/g, '&#39;')
}

function progressLine(view: SessionView): string {
  const done = `${view.itemsCompleted} finished this session`
  if (view.chunkProgress === null) return `<p class="progress">${done}</p>`
  const pct = Math.floor(view.chunkProgress * 100)
  return `<p class="progress">${done} &middot; current chunk ${pct}% complete</p>`
}

export function renderSession(view: SessionView): string {
  switch (view.phase) {
    case 'idle':
    case 'loading':
      return `<div class="screen"><p>Fetching the next report&hellip;</p></div>`
    case 'auth_required':
      return [
        `<div class="screen login">`,
        `<p>Your session token was not accepted. Enter a valid token to continue.</p>`,
        `<input id="token-input" type="password" autocomplete="off">`,
        `<button id="token-save">Sign in</button>`,
        `</div>`,
      ].join('')
    case 'chunk_complete':
      return [
        `<div class="screen done">`,
        `<h2>Audit chunk complete</h2>`,
        `<p>No reports are waiting for you right now. Thank you.</p>`,
        progressLine(view),
        `</div>`,
      ].join('')
    case 'error':
      return [
        `<div class="screen">`,
        `<div class="banner" id="retry-banner">`,
        `<p>Connection problem: ${escapeHtml(view.errorMessage ?? 'unknown')}.`,
        ` Nothing was lost.</p>`,
        `<button id="retry">Try again</button>`,
        `</div>`,
        progressLine(view),
        `</div>`,
      ].join('')
    case 'reviewing': {
      const item = view.item
      if (!item) return `<div class="screen"><p>Nothing to show.</p></div>`
      // Generic wording on purpose: raw service errors must never reach a
      // screen that displays a document.
      const banner = view.errorMessage
        ? `<div class="banner">Connection problem &mdash; the decision was` +
          ` not saved. Choose again to retry.</div>`
        : ''
      return [
        `<div class="screen review">`,
        banner,
        `<div class="timer" id="timer" aria-live="polite">${view.countdownSeconds}</div>`,
        `<pre class="report-text">${escapeHtml(item.text)}</pre>`,
        `<div class="decide">`,
        `<button id="decide-yes" class="big" data-decision="reportable">`,
        `Reportable</button>`,
        `<button id="decide-no" class="big" data-decision="non_reportable">`,
        `Non-Reportable</button>`,
        `</div>`,
        progressLine(view),
        `</div>`,
      ].join('')
    }
  }
}

/** Markup with the decision buttons removed, for blinding checks: what
 * remains must never mention any classification vocabulary. */
export function markupOutsideDecisionButtons(html: string): string {
  return html.replace(/<button[^>]*data-decision[\s\S]*?<\/button>/g, '')
}
