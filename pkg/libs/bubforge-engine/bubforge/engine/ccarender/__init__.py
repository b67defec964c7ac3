from bubforge.engine.ccarender.corpus import load_corpus_settings, make_corpus, render_record, sample_params
from bubforge.engine.ccarender.params import CcaParams, CorpusSettings
from bubforge.engine.ccarender.render import compose, coverage, render

__all__ = [
    "CcaParams",
    "CorpusSettings",
    "compose",
    "coverage",
    "load_corpus_settings",
    "make_corpus",
    "render",
    "render_record",
    "sample_params",
]
