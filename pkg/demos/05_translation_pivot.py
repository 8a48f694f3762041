"""
Translating through a learned map
=================================

Three synthetic "languages" share one latent vocabulary, each seen through its
own random rotation plus a little noise. A seed lexicon of 200 word pairs is
enough to fit the map and translate held-out words.
"""

import numpy as np

import orient
from orient.synthetic import lexicon, multilingual

rng = np.random.default_rng(4)
views = multilingual(1000, 50, ["es", "fr", "en"], rng, noise=0.01)
es, fr, en = views["es"], views["fr"], views["en"]
test = lexicon("es", "fr", range(200, 300))

##############################################################################
# Without alignment, neighbors are meaningless.

print("unaligned", orient.translation_eval(es, fr, test).to_text(), sep="\n", end="")

##############################################################################
# Direct alignment with a Spanish-French seed lexicon.

t = orient.train_translation(es, fr, lexicon("es", "fr", range(200)))
print("direct", orient.translation_eval(orient.apply(t, es), fr, test).to_text(), sep="\n", end="")

##############################################################################
# Pivot: align both onto English separately; no Spanish-French seed is used.

report = orient.pivot_translate(es, fr, en, lexicon("es", "en", range(200)), lexicon("fr", "en", range(200)), test)
print("pivot", report.to_text(), sep="\n", end="")
