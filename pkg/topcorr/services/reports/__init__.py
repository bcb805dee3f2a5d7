"""Human-readable reports rendered from Jinja2 Markdown templates."""
