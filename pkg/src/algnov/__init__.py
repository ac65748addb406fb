"""algnov: exact spectral-sequence and Ext-chart computations in truncated windows.

The package is organized along the pipeline:

* :mod:`algnov.linalg` -- exact linear algebra over Z/p^K (Howell forms,
  kernels, homology) plus a bit-packed GF(2) workhorse.
* :mod:`algnov.bphopf` -- the truncated Hopf algebroid of the Brown-Peterson
  spectrum: log coefficients, right unit, coproduct, and the induced
  associated-graded coaction.
* :mod:`algnov.cobar` -- bases and differentials of the reduced cobar complex
  with its augmentation-ideal filtration, and of the associated graded
  complex.
* :mod:`algnov.specseq` -- the spectral-sequence engine for filtered cochain
  complexes: pages, differentials, stable page, abutment oracle, Koszul
  checks.
* :mod:`algnov.hopfext` -- minimal free resolutions over graded connected
  Hopf algebras presented by their dual coproduct (classical Steenrod algebra
  and the mod-I quotient of the BP Hopf algebroid).
* :mod:`algnov.charts` -- regrading to Adams chart coordinates, naming,
  SVG/TSV/JSON emission, differential-table verification.
* :mod:`algnov.cli` -- command-line orchestration.
"""

__version__ = "0.1.0"
