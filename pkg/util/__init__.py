"""Cross-cutting helpers: logging and spans, run ids, status, settings, thread pool."""
