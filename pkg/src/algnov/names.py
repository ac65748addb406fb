"""Curated chart-name registry.

Positions are (stem, filtration); each position lists the names of the
dots drawn there, in chart order (the disambiguator is the list index).
Classical names live on the classical Adams chart; the cofiber-of-tau
side carries a few motivic-specific labels (overlines, tau-multiples)
with no classical counterpart.
"""

CLASSICAL_NAMES = {
    (0, 1): ['h0'],
    (1, 1): ['h1'],
    (3, 1): ['h2'],
    (7, 1): ['h3'],
    (8, 3): ['c0'],
    (9, 5): ['Ph1'],
    (11, 5): ['Ph2'],
    (14, 2): ['h3^2'],
    (14, 4): ['d0'],
    (15, 1): ['h4'],
    (16, 7): ['Pc0'],
    (17, 4): ['e0'],
    (17, 9): ['P^2h1'],
    (18, 4): ['f0'],
    (19, 3): ['c1'],
    (19, 9): ['P^2h2'],
    (20, 4): ['g'],
    (22, 8): ['Pd0'],
    (23, 4): ['h4c0'],
    (23, 7): ['i'],
    (24, 11): ['P^2c0'],
    (25, 8): ['Pe0'],
    (25, 13): ['P^3h1'],
    (26, 7): ['j'],
    (27, 13): ['P^3h2'],
    (28, 8): ['d0^2'],
    (29, 7): ['k'],
    (30, 2): ['h4^2'],
    (30, 6): ['Deltah2^2'],
    (30, 12): ['P^2d0'],
    (31, 1): ['h5'],
    (31, 5): ['n'],
    (31, 8): ['d0e0+h0^7h5'],
    (32, 4): ['d1'],
    (32, 6): ['Deltah1h3'],
    (32, 7): ['l'],
    (32, 15): ['P^3c0'],
    (33, 4): ['p'],
    (33, 12): ['P^2e0'],
    (33, 17): ['P^4h1'],
    (34, 8): ['e0^2'],
    (34, 11): ['Pj'],
    (35, 7): ['m'],
    (35, 17): ['P^4h2'],
    (36, 6): ['t'],
    (36, 12): ['Pd0^2'],
    (37, 5): ['x'],
    (37, 8): ['e0g'],
    (37, 11): ['d0i'],
    (38, 2): ['h3h5'],
    (38, 4): ['e1'],
    (38, 6): ['Deltah3^2'],
    (38, 16): ['P^3d0'],
    (39, 4): ['h5c0'],
    (39, 9): ['Deltah1d0'],
    (39, 12): ['Pd0e0'],
    (39, 15): ['P^2i'],
    (40, 4): ['f1'],
    (40, 6): ['Ph1h5'],
    (40, 8): ['g^2'],
    (40, 11): ['d0j'],
    (40, 19): ['P^4c0'],
    (41, 3): ['c2'],
    (41, 10): ['Deltah0^2e0'],
    (41, 16): ['P^3e0'],
    (41, 21): ['P^5h1'],
    (42, 6): ['Ph2h5'],
    (42, 9): ['Deltah1e0'],
    (42, 12): ['d0^3'],
    (42, 15): ['P^2j'],
    (43, 11): ['d0k'],
    (43, 21): ['P^5h2'],
    (44, 4): ['g2'],
    (44, 10): ['Deltah2^2d0'],
    (44, 16): ['P^2d0^2'],
    (45, 3): ['h3^2h5'],
    (45, 5): ['h5d0'],
    (45, 9): ['Deltah1g'],
    (45, 12): ['d0^2e0'],
    (45, 15): ['Pd0i'],
}

CTAU_NAMES = {
    (0, 1): ['h0'],
    (1, 1): ['h1'],
    (3, 1): ['h2'],
    (5, 3): ['ol(h1^4)'],
    (7, 1): ['h3'],
    (8, 3): ['c0'],
    (9, 5): ['Ph1'],
    (11, 4): ['ol(h1^2c0)'],
    (11, 5): ['Ph2'],
    (14, 2): ['h3^2'],
    (14, 4): ['d0'],
    (15, 1): ['h4'],
    (15, 2): ['h0h4'],
    (15, 4): ['h0^3h4'],
    (16, 2): ['h1h4'],
    (16, 7): ['Pc0'],
    (17, 4): ['e0'],
    (18, 2): ['h2h4'],
    (18, 4): ['f0'],
    (19, 3): ['c1'],
    (20, 4): ['taug'],
    (20, 5): ['h0g'],
    (21, 11): ['ol(P^2h1^4)'],
    (22, 7): ['c0d0'],
    (23, 4): ['h4c0'],
    (23, 5): ['h2g'],
    (23, 9): ['h0^2i'],
    (24, 11): ['P^2c0'],
    (25, 13): ['P^3h1'],
    (28, 8): ['d0^2'],
    (29, 7): ['k'],
    (30, 2): ['h4^2'],
    (30, 6): ['Deltah2^2'],
    (31, 1): ['h5'],
    (31, 4): ['h0^3h5'],
    (31, 5): ['n'],
    (31, 8): ['d0e0'],
    (31, 11): ['h0^10h5'],
    (32, 2): ['h1h5'],
    (32, 4): ['d1'],
    (32, 6): ['Deltah1h3'],
    (32, 7): ['l'],
    (32, 15): ['P^3c0'],
    (33, 4): ['p'],
    (34, 2): ['h2h5'],
    (34, 8): ['e0^2'],
    (35, 5): ['ol(h1^2d1)'],
    (35, 7): ['m'],
    (36, 6): ['t'],
    (37, 5): ['x'],
    (37, 8): ['e0g'],
    (38, 2): ['h3h5'],
    (38, 4): ['e1', 'h0^2h3h5'],
    (39, 3): ['h1h3h5'],
    (39, 4): ['h5c0'],
    (39, 17): ['P^2h0^2i'],
    (40, 4): ['f1'],
    (40, 19): ['P^4c0'],
    (41, 3): ['c2'],
    (41, 4): ['h0c2'],
    (44, 4): ['g2'],
    (45, 3): ['h3^2h5'],
    (45, 5): ['h5d0'],
}
