// Entry point: a tiny hash router. Experts land on #/q/<token> (the
// questionnaire wizard); coordinators on #/panel/<id> (the dashboard);
// everything else shows the panel list plus a token box.

import { ApiClient } from './api.js';
import { DashboardPage } from './dashboard.js';
import { browserDraftStore } from './draft.js';
import { escapeHtml } from './html.js';
import { WizardPage } from './wizard-page.js';

async function renderHome(root: HTMLElement, api: ApiClient): Promise<void> {
  const doc = await api.listPanels();
  const items = doc.panels
    .map(
      (panel) => `<li><a href="#/panel/${encodeURIComponent(panel.id)}">
        ${escapeHtml(panel.id)}</a> (${escapeHtml(panel.field)}, ${panel.state})</li>`,
    )
    .join('\n');
  root.innerHTML = `
    <section class="home">
      <h1>Publisher consultation</h1>
      <form data-token-form>
        <label>Your questionnaire token
          <input type="text" name="token" placeholder="paste the token from your email">
        </label>
        <button type="submit">Open questionnaire</button>
      </form>
      <h2>Panels</h2>
      ${items ? `<ul>${items}</ul>` : '<p class="notice">No panels yet.</p>'}
    </section>`;
  const form = root.querySelector('form[data-token-form]') as HTMLFormElement;
  form.addEventListener('submit', (event) => {
    event.preventDefault();
    const token = (form.elements.namedItem('token') as HTMLInputElement).value.trim();
    if (token) window.location.hash = `#/q/${encodeURIComponent(token)}`;
  });
}

function route(): void {
  const outlet = document.getElementById('app');
  if (!outlet) return;
  // fresh element per route so stale page listeners die with it
  const root = document.createElement('div');
  outlet.replaceChildren(root);
  const api = new ApiClient('');
  const hash = window.location.hash;
  const wizard = hash.match(/^#\/q\/(.+)$/);
  const panel = hash.match(/^#\/panel\/(.+)$/);
  if (wizard) {
    void new WizardPage(
      root,
      api,
      decodeURIComponent(wizard[1]),
      browserDraftStore(window.localStorage),
    ).start();
  } else if (panel) {
    void new DashboardPage(root, api, decodeURIComponent(panel[1])).start();
  } else {
    void renderHome(root, api);
  }
}

window.addEventListener('hashchange', route);
route();
