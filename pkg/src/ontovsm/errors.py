"""Exception types shared across the package."""


class OntoVsmError(Exception):
    """Base class for all errors raised by this package."""


class TaxonomyError(OntoVsmError):
    """Invalid class taxonomy: cycles, undeclared parents, or duplicates."""


class KnowledgeBaseError(OntoVsmError):
    """Invalid entity knowledge base."""


class CorpusError(OntoVsmError):
    """Invalid document, query, or corpus input."""


class ConfigError(OntoVsmError):
    """Invalid model weights or options."""


class EmptyQueryError(OntoVsmError):
    """The query contributes no terms usable by the selected model."""


class IndexFormatError(OntoVsmError):
    """A persisted index directory is missing files or has a bad format."""


class EvalError(OntoVsmError):
    """Bad evaluation input: qrels, run files, or missing judgments."""
