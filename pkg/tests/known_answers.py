"""Known-answer constants for the toy modulus N = 1155.

Two reference keys over f = (21, 55) and their hand-checked ciphertexts.
Key A carries a fully pinned encryption of 257 (fixed coins r = 291, row
choices 2 and 3); key B carries pinned encryptions of 5 and 12 whose sum
and product decrypt to 17 and 60. Every matrix here is frozen: tests
compare against these entries bit for bit.
"""

from matfhe.matrix import Matrix
from matfhe.ring import RingModulus

N = 1155
MOD = RingModulus(m=2, bits=8, p=(3, 5), q=(7, 11), f=(21, 55), n=N)

KA = Matrix.from_rows([
    [33, 929, 342, 393],
    [963, 100, 1113, 161],
    [202, 88, 1042, 976],
    [906, 1051, 944, 441],
], N)
KA_INV = Matrix.from_rows([
    [333, 1009, 1093, 394],
    [566, 870, 285, 192],
    [305, 642, 456, 407],
    [326, 1103, 363, 837],
], N)

KB = Matrix.from_rows([
    [366, 826, 315, 660],
    [224, 398, 457, 165],
    [1063, 849, 492, 597],
    [401, 1083, 114, 496],
], N)
KB_INV = Matrix.from_rows([
    [1083, 213, 1, 1053],
    [1093, 792, 84, 342],
    [307, 784, 877, 471],
    [300, 375, 874, 613],
], N)

# Enc4(257) under key A with the fixed coins above.
DIAG_A = (257, 291, 236, 312)
CT_A = Matrix.from_rows([
    [464, 206, 422, 308],
    [585, 467, 885, 945],
    [957, 752, 1119, 882],
    [315, 1136, 270, 201],
], N)

# Encryptions of 5 and 12 under key B, plus their pinned sum and product.
CT_B5 = Matrix.from_rows([
    [286, 618, 534, 180],
    [954, 662, 651, 765],
    [122, 1131, 428, 450],
    [825, 285, 1020, 196],
], N)
CT_B12 = Matrix.from_rows([
    [877, 813, 768, 1122],
    [60, 1149, 1152, 33],
    [507, 245, 304, 759],
    [472, 531, 828, 150],
], N)
CT_B_SUM = Matrix.from_rows([
    [8, 276, 147, 147],
    [1014, 656, 648, 798],
    [629, 221, 732, 54],
    [142, 816, 693, 346],
], N)
CT_B_PROD = Matrix.from_rows([
    [265, 150, 180, 897],
    [180, 1005, 450, 933],
    [185, 775, 500, 609],
    [82, 816, 933, 360],
], N)
DIAG_B_SUM = (17, 408, 1079, 238)
DIAG_B_PROD = (60, 440, 673, 957)
