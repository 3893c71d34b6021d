"""scikit-learn style wrappers around instantiation and validation.

``SchemaValidator`` is a classifier-shaped estimator whose ``predict``
answers membership for a batch of documents; ``TemplateExpander`` is a
transformer mapping repositories to instantiated documents.  Both take the
XTL source as a constructor parameter and compile it in ``fit``, so they
clone, pickle and grid-search like any other estimator.
"""

from __future__ import annotations

import os
from collections.abc import Mapping
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .expander import ExpansionSettings, expand
from .hedge import Element, Text, parse_xml
from .reg import ATOMS, Epsilon, Or, Star, Then, normalize, normalize_macros
from .repo import Repository, xml_repository
from .surface import parse_xtl
from .validator import compile_schema

_REG_TYPES = ATOMS + (Epsilon, Or, Then, Star)


def check_hedge(x, preserve_space=False):
    """Coerce a document given as hedge, node, markup or file path."""
    if isinstance(x, (Element, Text)):
        return (x,)
    if isinstance(x, tuple) and all(isinstance(n, (Element, Text)) for n in x):
        return x
    if isinstance(x, os.PathLike):
        return parse_xml(Path(x).read_bytes(), preserve_space)
    if isinstance(x, (str, bytes)):
        return parse_xml(x, preserve_space)
    raise TypeError(f"cannot read a document from {type(x).__name__}")


def check_template(x, preserve_space=False):
    """Coerce XTL input to ``(entry, macros)``.

    Accepts a term, an ``(entry, macros)`` pair, or anything
    :func:`check_hedge` accepts.
    """
    if isinstance(x, _REG_TYPES):
        return normalize(x), {}
    if isinstance(x, tuple) and len(x) == 2 and isinstance(x[1], Mapping):
        return normalize(x[0]), normalize_macros(x[1])
    if x is None:
        raise ValueError("no template or schema given")
    return parse_xtl(check_hedge(x, preserve_space))


def check_repository(x, preserve_space=False) -> Repository:
    if isinstance(x, Repository):
        return x
    return xml_repository(check_hedge(x, preserve_space))


def _batch(X):
    if isinstance(X, (str, bytes, os.PathLike, Element, Text, Repository)):
        raise TypeError("expected a sequence of inputs, got a single one")
    return list(X)


class SchemaValidator(BaseEstimator):
    """Membership classifier for one XTL schema."""

    def __init__(self, schema=None, preserve_space=False):
        self.schema = schema
        self.preserve_space = preserve_space

    def fit(self, X=None, y=None):
        self.entry_, self.macros_ = check_template(self.schema)
        self.compiled_ = compile_schema(self.entry_, self.macros_)
        return self

    def report(self, doc):
        check_is_fitted(self, "compiled_")
        return self.compiled_.validate(check_hedge(doc, self.preserve_space))

    def predict(self, X):
        return np.array([self.report(doc).valid for doc in _batch(X)], dtype=bool)

    def score(self, X, y):
        return float(np.mean(self.predict(X) == np.asarray(y, dtype=bool)))


class TemplateExpander(TransformerMixin, BaseEstimator):
    """Instantiates one template against each repository it transforms."""

    def __init__(self, template=None, strict=False, max_macro_depth=256, preserve_space=False):
        self.template = template
        self.strict = strict
        self.max_macro_depth = max_macro_depth
        self.preserve_space = preserve_space

    def fit(self, X=None, y=None):
        self.entry_, self.macros_ = check_template(self.template)
        self.settings_ = ExpansionSettings(self.max_macro_depth, not self.strict)
        return self

    def transform(self, X):
        check_is_fitted(self, "entry_")
        return [
            expand(self.entry_, self.macros_, check_repository(r, self.preserve_space), self.settings_)
            for r in _batch(X)
        ]
