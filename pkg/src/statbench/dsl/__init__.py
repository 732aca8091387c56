"""The transcription language: syntax tree, parser, templates, evaluator."""
