// Browser entry point: resolve the session from the URL and boot the app.
// `?survey=<id>` opens a fresh session (and rewrites the URL to its token);
// `?t=<token>` resumes an existing one.

import { Client } from "./api.js";
import { App } from "./app.js";

const root = document.getElementById("app");
if (root) {
    const params = new URLSearchParams(window.location.search);
    const token = params.get("t");
    const surveyId = params.get("survey");
    const client = new Client();

    if (token) {
        App.start(root, client, { token }).catch((err) => {
            root.textContent = `Could not resume this session: ${err.message ?? err}`;
        });
    } else if (surveyId) {
        App.start(root, client, { surveyId }).then((app) => {
            const url = new URL(window.location.href);
            url.searchParams.delete("survey");
            url.searchParams.set("t", app.sessionToken);
            window.history.replaceState(null, "", url.toString());
        }).catch((err) => {
            root.textContent = `Could not start the survey: ${err.message ?? err}`;
        });
    } else {
        root.textContent =
            "Open this page with ?survey=<id> to begin, or ?t=<token> to resume.";
    }
}
