"""Standard North-Atlantic wave scatter table.

Occurrence counts per sea state, indexed by significant wave height
(rows, 0.5 m to 16.5 m in 1 m steps, bin centres) and zero-crossing
period (columns, 3.5 s to 18.5 s in 1 s steps, bin centres).
"""

import numpy as np

HS_BINS = np.arange(0.5, 17.0, 1.0)
TZ_BINS = np.arange(3.5, 19.0, 1.0)

# fmt: off
COUNTS = np.array([
    # Tz:  3.5    4.5    5.5     6.5     7.5     8.5     9.5    10.5    11.5    12.5   13.5   14.5  15.5  16.5 17.5 18.5
    [      1.3, 133.7, 865.6, 1186.0,  634.2,  186.3,   36.9,    5.6,    0.7,    0.1,   0.0,   0.0,  0.0,  0.0, 0.0, 0.0],  # 0.5 m
    [      0.0,  29.3, 986.0, 4976.0, 7738.0, 5569.7, 2375.7,  703.5,  160.7,   30.5,   5.1,   0.8,  0.1,  0.0, 0.0, 0.0],  # 1.5 m
    [      0.0,   2.2, 197.5, 2158.8, 6230.0, 7449.5, 4860.4, 2066.0,  644.5,  160.2,  33.7,   6.3,  1.1,  0.2, 0.0, 0.0],  # 2.5 m
    [      0.0,   0.2,  34.9,  695.5, 3226.5, 5675.0, 5099.1, 2838.0, 1114.1,  337.7,  84.3,  18.2,  3.5,  0.6, 0.1, 0.0],  # 3.5 m
    [      0.0,   0.0,   6.0,  196.1, 1354.3, 3288.5, 3857.5, 2685.5, 1275.2,  455.1, 130.9,  31.9,  6.9,  1.3, 0.2, 0.0],  # 4.5 m
    [      0.0,   0.0,   1.0,   51.0,  498.4, 1602.9, 2372.7, 2008.3, 1126.0,  463.6, 150.9,  41.0,  9.7,  2.1, 0.4, 0.1],  # 5.5 m
    [      0.0,   0.0,   0.2,   12.6,  167.0,  690.3, 1257.9, 1268.6,  825.9,  386.8, 140.8,  42.2, 10.9,  2.5, 0.5, 0.1],  # 6.5 m
    [      0.0,   0.0,   0.0,    3.0,   52.1,  270.1,  594.4,  703.2,  524.9,  276.7, 111.7,  36.7, 10.2,  2.5, 0.6, 0.1],  # 7.5 m
    [      0.0,   0.0,   0.0,    0.7,   15.4,   97.9,  255.9,  350.6,  296.9,  174.6,  77.6,  27.7,  8.4,  2.2, 0.5, 0.1],  # 8.5 m
    [      0.0,   0.0,   0.0,    0.2,    4.3,   33.2,  101.9,  159.9,  152.2,   99.2,  48.3,  18.7,  6.1,  1.7, 0.4, 0.1],  # 9.5 m
    [      0.0,   0.0,   0.0,    0.0,    1.2,   10.7,   37.9,   67.5,   71.7,   51.5,  27.3,  11.4,  4.0,  1.2, 0.3, 0.1],  # 10.5 m
    [      0.0,   0.0,   0.0,    0.0,    0.3,    3.3,   13.3,   26.6,   31.4,   24.7,  14.2,   6.4,  2.4,  0.7, 0.2, 0.1],  # 11.5 m
    [      0.0,   0.0,   0.0,    0.0,    0.1,    1.0,    4.4,    9.9,   12.8,   11.0,   6.8,   3.3,  1.3,  0.4, 0.1, 0.0],  # 12.5 m
    [      0.0,   0.0,   0.0,    0.0,    0.0,    0.3,    1.4,    3.5,    5.0,    4.6,   3.1,   1.6,  0.7,  0.2, 0.1, 0.0],  # 13.5 m
    [      0.0,   0.0,   0.0,    0.0,    0.0,    0.1,    0.4,    1.2,    1.8,    1.8,   1.3,   0.7,  0.3,  0.1, 0.0, 0.0],  # 14.5 m
    [      0.0,   0.0,   0.0,    0.0,    0.0,    0.0,    0.1,    0.4,    0.6,    0.7,   0.5,   0.3,  0.1,  0.1, 0.0, 0.0],  # 15.5 m
    [      0.0,   0.0,   0.0,    0.0,    0.0,    0.0,    0.0,    0.1,    0.2,    0.2,   0.2,   0.1,  0.1,  0.0, 0.0, 0.0],  # 16.5 m
])
# fmt: on

COUNTS.setflags(write=False)
HS_BINS.setflags(write=False)
TZ_BINS.setflags(write=False)
