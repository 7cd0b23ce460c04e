"""Writes data/ieee118.json.

Topology, impedances, charging and generator set points of the IEEE 118-bus
case (MATPOWER/PYPOWER case118). Planning modifications:
- demand scaled to 3733.07 MW / 1442.98 MVAr and generator capacity to
  7220 MW, proportionally per bus;
- fixed bus shunts folded into reactive demand at 1 p.u. voltage, not below
  zero at load buses;
- parallel branches merged into one corridor of identical circuits whose
  pair reproduces the original parallel impedance;
- per-circuit ratings by voltage class (138 kV lines 175 MVA, 345 kV lines
  and transformers 500 MVA), then reduced to 60%;
- circuit cost proportional to reactance, 160.5 x (10^6 US$, x in p.u.);
- at most 2 new circuits per corridor, no reactive candidates;
- transformer taps are not modelled; generator dispatch and voltage set points
  come from an AC optimal power flow of the tap-free existing network.
"""
import json
import pathlib

OUT = pathlib.Path(__file__).resolve().parents[2] / "data"
LOAD_MW, LOAD_MVAR, CAPACITY_MW = 3733.07, 1442.98, 7220.0
RATING_FACTOR = 0.6
COST_PER_X = 160.5

# id, type (3 slack, 2 pv, 1 pq), Pd, Qd (MW/MVAr), Gs, Bs (MW/MVAr at 1 p.u.), base kV
BUSES = [
    (1, 2, 51, 27, 0, 0, 138), (2, 1, 20, 9, 0, 0, 138), (3, 1, 39, 10, 0, 0, 138), (4, 2, 39, 12, 0, 0, 138), (5, 1, 0, 0, 0, -40, 138),
    (6, 2, 52, 22, 0, 0, 138), (7, 1, 19, 2, 0, 0, 138), (8, 2, 28, 0, 0, 0, 345), (9, 1, 0, 0, 0, 0, 345), (10, 2, 0, 0, 0, 0, 345),
    (11, 1, 70, 23, 0, 0, 138), (12, 2, 47, 10, 0, 0, 138), (13, 1, 34, 16, 0, 0, 138), (14, 1, 14, 1, 0, 0, 138), (15, 2, 90, 30, 0, 0, 138),
    (16, 1, 25, 10, 0, 0, 138), (17, 1, 11, 3, 0, 0, 138), (18, 2, 60, 34, 0, 0, 138), (19, 2, 45, 25, 0, 0, 138), (20, 1, 18, 3, 0, 0, 138),
    (21, 1, 14, 8, 0, 0, 138), (22, 1, 10, 5, 0, 0, 138), (23, 1, 7, 3, 0, 0, 138), (24, 2, 13, 0, 0, 0, 138), (25, 2, 0, 0, 0, 0, 138),
    (26, 2, 0, 0, 0, 0, 345), (27, 2, 71, 13, 0, 0, 138), (28, 1, 17, 7, 0, 0, 138), (29, 1, 24, 4, 0, 0, 138), (30, 1, 0, 0, 0, 0, 345),
    (31, 2, 43, 27, 0, 0, 138), (32, 2, 59, 23, 0, 0, 138), (33, 1, 23, 9, 0, 0, 138), (34, 2, 59, 26, 0, 14, 138), (35, 1, 33, 9, 0, 0, 138),
    (36, 2, 31, 17, 0, 0, 138), (37, 1, 0, 0, 0, -25, 138), (38, 1, 0, 0, 0, 0, 345), (39, 1, 27, 11, 0, 0, 138), (40, 2, 66, 23, 0, 0, 138),
    (41, 1, 37, 10, 0, 0, 138), (42, 2, 96, 23, 0, 0, 138), (43, 1, 18, 7, 0, 0, 138), (44, 1, 16, 8, 0, 10, 138), (45, 1, 53, 22, 0, 10, 138),
    (46, 2, 28, 10, 0, 10, 138), (47, 1, 34, 0, 0, 0, 138), (48, 1, 20, 11, 0, 15, 138), (49, 2, 87, 30, 0, 0, 138), (50, 1, 17, 4, 0, 0, 138),
    (51, 1, 17, 8, 0, 0, 138), (52, 1, 18, 5, 0, 0, 138), (53, 1, 23, 11, 0, 0, 138), (54, 2, 113, 32, 0, 0, 138), (55, 2, 63, 22, 0, 0, 138),
    (56, 2, 84, 18, 0, 0, 138), (57, 1, 12, 3, 0, 0, 138), (58, 1, 12, 3, 0, 0, 138), (59, 2, 277, 113, 0, 0, 138), (60, 1, 78, 3, 0, 0, 138),
    (61, 2, 0, 0, 0, 0, 138), (62, 2, 77, 14, 0, 0, 138), (63, 1, 0, 0, 0, 0, 345), (64, 1, 0, 0, 0, 0, 345), (65, 2, 0, 0, 0, 0, 345),
    (66, 2, 39, 18, 0, 0, 138), (67, 1, 28, 7, 0, 0, 138), (68, 1, 0, 0, 0, 0, 345), (69, 3, 0, 0, 0, 0, 138), (70, 2, 66, 20, 0, 0, 138),
    (71, 1, 0, 0, 0, 0, 138), (72, 2, 12, 0, 0, 0, 138), (73, 2, 6, 0, 0, 0, 138), (74, 2, 68, 27, 0, 12, 138), (75, 1, 47, 11, 0, 0, 138),
    (76, 2, 68, 36, 0, 0, 138), (77, 2, 61, 28, 0, 0, 138), (78, 1, 71, 26, 0, 0, 138), (79, 1, 39, 32, 0, 20, 138), (80, 2, 130, 26, 0, 0, 138),
    (81, 1, 0, 0, 0, 0, 345), (82, 1, 54, 27, 0, 20, 138), (83, 1, 20, 10, 0, 10, 138), (84, 1, 11, 7, 0, 0, 138), (85, 2, 24, 15, 0, 0, 138),
    (86, 1, 21, 10, 0, 0, 138), (87, 2, 0, 0, 0, 0, 161), (88, 1, 48, 10, 0, 0, 138), (89, 2, 0, 0, 0, 0, 138), (90, 2, 163, 42, 0, 0, 138),
    (91, 2, 10, 0, 0, 0, 138), (92, 2, 65, 10, 0, 0, 138), (93, 1, 12, 7, 0, 0, 138), (94, 1, 30, 16, 0, 0, 138), (95, 1, 42, 31, 0, 0, 138),
    (96, 1, 38, 15, 0, 0, 138), (97, 1, 15, 9, 0, 0, 138), (98, 1, 34, 8, 0, 0, 138), (99, 2, 42, 0, 0, 0, 138), (100, 2, 37, 18, 0, 0, 138),
    (101, 1, 22, 15, 0, 0, 138), (102, 1, 5, 3, 0, 0, 138), (103, 2, 23, 16, 0, 0, 138), (104, 2, 38, 25, 0, 0, 138), (105, 2, 31, 26, 0, 20, 138),
    (106, 1, 43, 16, 0, 0, 138), (107, 2, 50, 12, 0, 6, 138), (108, 1, 2, 1, 0, 0, 138), (109, 1, 8, 3, 0, 0, 138), (110, 2, 39, 30, 0, 6, 138),
    (111, 2, 0, 0, 0, 0, 138), (112, 2, 68, 13, 0, 0, 138), (113, 2, 6, 0, 0, 0, 138), (114, 1, 8, 3, 0, 0, 138), (115, 1, 22, 7, 0, 0, 138),
    (116, 2, 184, 0, 0, 0, 138), (117, 1, 20, 8, 0, 0, 138), (118, 1, 33, 15, 0, 0, 138),
]
# bus, Pg, Qmax, Qmin, Vg, Pmax, Pmin
GENS = [
    (1, 0, 15, -5, 0.955, 100, 0), (4, 0, 300, -300, 0.998, 100, 0), (6, 0, 50, -13, 0.99, 100, 0), (8, 0, 300, -300, 1.015, 100, 0),
    (10, 450, 200, -147, 1.05, 550, 0), (12, 85, 120, -35, 0.99, 185, 0), (15, 0, 30, -10, 0.97, 100, 0), (18, 0, 50, -16, 0.973, 100, 0),
    (19, 0, 24, -8, 0.962, 100, 0), (24, 0, 300, -300, 0.992, 100, 0), (25, 220, 140, -47, 1.05, 320, 0), (26, 314, 1000, -1000, 1.015, 414, 0),
    (27, 0, 300, -300, 0.968, 100, 0), (31, 7, 300, -300, 0.967, 107, 0), (32, 0, 42, -14, 0.963, 100, 0), (34, 0, 24, -8, 0.984, 100, 0),
    (36, 0, 24, -8, 0.98, 100, 0), (40, 0, 300, -300, 0.97, 100, 0), (42, 0, 300, -300, 0.985, 100, 0), (46, 19, 100, -100, 1.005, 119, 0),
    (49, 204, 210, -85, 1.025, 304, 0), (54, 48, 300, -300, 0.955, 148, 0), (55, 0, 23, -8, 0.952, 100, 0), (56, 0, 15, -8, 0.954, 100, 0),
    (59, 155, 180, -60, 0.985, 255, 0), (61, 160, 300, -100, 0.995, 260, 0), (62, 0, 20, -20, 0.998, 100, 0), (65, 391, 200, -67, 1.005, 491, 0),
    (66, 392, 200, -67, 1.05, 492, 0), (69, 516.4, 300, -300, 1.035, 805.2, 0), (70, 0, 32, -10, 0.984, 100, 0), (72, 0, 100, -100, 0.98, 100, 0),
    (73, 0, 100, -100, 0.991, 100, 0), (74, 0, 9, -6, 0.958, 100, 0), (76, 0, 23, -8, 0.943, 100, 0), (77, 0, 70, -20, 1.006, 100, 0),
    (80, 477, 280, -165, 1.04, 577, 0), (85, 0, 23, -8, 0.985, 100, 0), (87, 4, 1000, -100, 1.015, 104, 0), (89, 607, 300, -210, 1.005, 707, 0),
    (90, 0, 300, -300, 0.985, 100, 0), (91, 0, 100, -100, 0.98, 100, 0), (92, 0, 9, -3, 0.99, 100, 0), (99, 0, 100, -100, 1.01, 100, 0),
    (100, 252, 155, -50, 1.017, 352, 0), (103, 40, 40, -15, 1.01, 140, 0), (104, 0, 23, -8, 0.971, 100, 0), (105, 0, 23, -8, 0.965, 100, 0),
    (107, 0, 200, -200, 0.952, 100, 0), (110, 0, 23, -8, 0.973, 100, 0), (111, 36, 1000, -100, 0.98, 136, 0), (112, 0, 1000, -100, 0.975, 100, 0),
    (113, 0, 200, -100, 0.993, 100, 0), (116, 0, 1000, -1000, 1.005, 100, 0),
]
# from, to, r, x, b, tap
BRANCHES = [
    (1, 2, 0.0303, 0.0999, 0.0254, 0), (1, 3, 0.0129, 0.0424, 0.01082, 0), (4, 5, 0.00176, 0.00798, 0.0021, 0), (3, 5, 0.0241, 0.108, 0.0284, 0),
    (5, 6, 0.0119, 0.054, 0.01426, 0), (6, 7, 0.00459, 0.0208, 0.0055, 0), (8, 9, 0.00244, 0.0305, 1.162, 0), (8, 5, 0, 0.0267, 0, 0.985),
    (9, 10, 0.00258, 0.0322, 1.23, 0), (4, 11, 0.0209, 0.0688, 0.01748, 0), (5, 11, 0.0203, 0.0682, 0.01738, 0), (11, 12, 0.00595, 0.0196, 0.00502, 0),
    (2, 12, 0.0187, 0.0616, 0.01572, 0), (3, 12, 0.0484, 0.16, 0.0406, 0), (7, 12, 0.00862, 0.034, 0.00874, 0), (11, 13, 0.02225, 0.0731, 0.01876, 0),
    (12, 14, 0.0215, 0.0707, 0.01816, 0), (13, 15, 0.0744, 0.2444, 0.06268, 0), (14, 15, 0.0595, 0.195, 0.0502, 0), (12, 16, 0.0212, 0.0834, 0.0214, 0),
    (15, 17, 0.0132, 0.0437, 0.0444, 0), (16, 17, 0.0454, 0.1801, 0.0466, 0), (17, 18, 0.0123, 0.0505, 0.01298, 0), (18, 19, 0.01119, 0.0493, 0.01142, 0),
    (19, 20, 0.0252, 0.117, 0.0298, 0), (15, 19, 0.012, 0.0394, 0.0101, 0), (20, 21, 0.0183, 0.0849, 0.0216, 0), (21, 22, 0.0209, 0.097, 0.0246, 0),
    (22, 23, 0.0342, 0.159, 0.0404, 0), (23, 24, 0.0135, 0.0492, 0.0498, 0), (23, 25, 0.0156, 0.08, 0.0864, 0), (26, 25, 0, 0.0382, 0, 0.96),
    (25, 27, 0.0318, 0.163, 0.1764, 0), (27, 28, 0.01913, 0.0855, 0.0216, 0), (28, 29, 0.0237, 0.0943, 0.0238, 0), (30, 17, 0, 0.0388, 0, 0.96),
    (8, 30, 0.00431, 0.0504, 0.514, 0), (26, 30, 0.00799, 0.086, 0.908, 0), (17, 31, 0.0474, 0.1563, 0.0399, 0), (29, 31, 0.0108, 0.0331, 0.0083, 0),
    (23, 32, 0.0317, 0.1153, 0.1173, 0), (31, 32, 0.0298, 0.0985, 0.0251, 0), (27, 32, 0.0229, 0.0755, 0.01926, 0), (15, 33, 0.038, 0.1244, 0.03194, 0),
    (19, 34, 0.0752, 0.247, 0.0632, 0), (35, 36, 0.00224, 0.0102, 0.00268, 0), (35, 37, 0.011, 0.0497, 0.01318, 0), (33, 37, 0.0415, 0.142, 0.0366, 0),
    (34, 36, 0.00871, 0.0268, 0.00568, 0), (34, 37, 0.00256, 0.0094, 0.00984, 0), (38, 37, 0, 0.0375, 0, 0.935), (37, 39, 0.0321, 0.106, 0.027, 0),
    (37, 40, 0.0593, 0.168, 0.042, 0), (30, 38, 0.00464, 0.054, 0.422, 0), (39, 40, 0.0184, 0.0605, 0.01552, 0), (40, 41, 0.0145, 0.0487, 0.01222, 0),
    (40, 42, 0.0555, 0.183, 0.0466, 0), (41, 42, 0.041, 0.135, 0.0344, 0), (43, 44, 0.0608, 0.2454, 0.06068, 0), (34, 43, 0.0413, 0.1681, 0.04226, 0),
    (44, 45, 0.0224, 0.0901, 0.0224, 0), (45, 46, 0.04, 0.1356, 0.0332, 0), (46, 47, 0.038, 0.127, 0.0316, 0), (46, 48, 0.0601, 0.189, 0.0472, 0),
    (47, 49, 0.0191, 0.0625, 0.01604, 0), (42, 49, 0.0715, 0.323, 0.086, 0), (42, 49, 0.0715, 0.323, 0.086, 0), (45, 49, 0.0684, 0.186, 0.0444, 0),
    (48, 49, 0.0179, 0.0505, 0.01258, 0), (49, 50, 0.0267, 0.0752, 0.01874, 0), (49, 51, 0.0486, 0.137, 0.0342, 0), (51, 52, 0.0203, 0.0588, 0.01396, 0),
    (52, 53, 0.0405, 0.1635, 0.04058, 0), (53, 54, 0.0263, 0.122, 0.031, 0), (49, 54, 0.073, 0.289, 0.0738, 0), (49, 54, 0.0869, 0.291, 0.073, 0),
    (54, 55, 0.0169, 0.0707, 0.0202, 0), (54, 56, 0.00275, 0.00955, 0.00732, 0), (55, 56, 0.00488, 0.0151, 0.00374, 0), (56, 57, 0.0343, 0.0966, 0.0242, 0),
    (50, 57, 0.0474, 0.134, 0.0332, 0), (56, 58, 0.0343, 0.0966, 0.0242, 0), (51, 58, 0.0255, 0.0719, 0.01788, 0), (54, 59, 0.0503, 0.2293, 0.0598, 0),
    (56, 59, 0.0825, 0.251, 0.0569, 0), (56, 59, 0.0803, 0.239, 0.0536, 0), (55, 59, 0.04739, 0.2158, 0.05646, 0), (59, 60, 0.0317, 0.145, 0.0376, 0),
    (59, 61, 0.0328, 0.15, 0.0388, 0), (60, 61, 0.00264, 0.0135, 0.01456, 0), (60, 62, 0.0123, 0.0561, 0.01468, 0), (61, 62, 0.00824, 0.0376, 0.0098, 0),
    (63, 59, 0, 0.0386, 0, 0.96), (63, 64, 0.00172, 0.02, 0.216, 0), (64, 61, 0, 0.0268, 0, 0.985), (38, 65, 0.00901, 0.0986, 1.046, 0),
    (64, 65, 0.00269, 0.0302, 0.38, 0), (49, 66, 0.018, 0.0919, 0.0248, 0), (49, 66, 0.018, 0.0919, 0.0248, 0), (62, 66, 0.0482, 0.218, 0.0578, 0),
    (62, 67, 0.0258, 0.117, 0.031, 0), (65, 66, 0, 0.037, 0, 0.935), (66, 67, 0.0224, 0.1015, 0.02682, 0), (65, 68, 0.00138, 0.016, 0.638, 0),
    (47, 69, 0.0844, 0.2778, 0.07092, 0), (49, 69, 0.0985, 0.324, 0.0828, 0), (68, 69, 0, 0.037, 0, 0.935), (69, 70, 0.03, 0.127, 0.122, 0),
    (24, 70, 0.00221, 0.4115, 0.10198, 0), (70, 71, 0.00882, 0.0355, 0.00878, 0), (24, 72, 0.0488, 0.196, 0.0488, 0), (71, 72, 0.0446, 0.18, 0.04444, 0),
    (71, 73, 0.00866, 0.0454, 0.01178, 0), (70, 74, 0.0401, 0.1323, 0.03368, 0), (70, 75, 0.0428, 0.141, 0.036, 0), (69, 75, 0.0405, 0.122, 0.124, 0),
    (74, 75, 0.0123, 0.0406, 0.01034, 0), (76, 77, 0.0444, 0.148, 0.0368, 0), (69, 77, 0.0309, 0.101, 0.1038, 0), (75, 77, 0.0601, 0.1999, 0.04978, 0),
    (77, 78, 0.00376, 0.0124, 0.01264, 0), (78, 79, 0.00546, 0.0244, 0.00648, 0), (77, 80, 0.017, 0.0485, 0.0472, 0), (77, 80, 0.0294, 0.105, 0.0228, 0),
    (79, 80, 0.0156, 0.0704, 0.0187, 0), (68, 81, 0.00175, 0.0202, 0.808, 0), (81, 80, 0, 0.037, 0, 0.935), (77, 82, 0.0298, 0.0853, 0.08174, 0),
    (82, 83, 0.0112, 0.03665, 0.03796, 0), (83, 84, 0.0625, 0.132, 0.0258, 0), (83, 85, 0.043, 0.148, 0.0348, 0), (84, 85, 0.0302, 0.0641, 0.01234, 0),
    (85, 86, 0.035, 0.123, 0.0276, 0), (86, 87, 0.02828, 0.2074, 0.0445, 0), (85, 88, 0.02, 0.102, 0.0276, 0), (85, 89, 0.0239, 0.173, 0.047, 0),
    (88, 89, 0.0139, 0.0712, 0.01934, 0), (89, 90, 0.0518, 0.188, 0.0528, 0), (89, 90, 0.0238, 0.0997, 0.106, 0), (90, 91, 0.0254, 0.0836, 0.0214, 0),
    (89, 92, 0.0099, 0.0505, 0.0548, 0), (89, 92, 0.0393, 0.1581, 0.0414, 0), (91, 92, 0.0387, 0.1272, 0.03268, 0), (92, 93, 0.0258, 0.0848, 0.0218, 0),
    (92, 94, 0.0481, 0.158, 0.0406, 0), (93, 94, 0.0223, 0.0732, 0.01876, 0), (94, 95, 0.0132, 0.0434, 0.0111, 0), (80, 96, 0.0356, 0.182, 0.0494, 0),
    (82, 96, 0.0162, 0.053, 0.0544, 0), (94, 96, 0.0269, 0.0869, 0.023, 0), (80, 97, 0.0183, 0.0934, 0.0254, 0), (80, 98, 0.0238, 0.108, 0.0286, 0),
    (80, 99, 0.0454, 0.206, 0.0546, 0), (92, 100, 0.0648, 0.295, 0.0472, 0), (94, 100, 0.0178, 0.058, 0.0604, 0), (95, 96, 0.0171, 0.0547, 0.01474, 0),
    (96, 97, 0.0173, 0.0885, 0.024, 0), (98, 100, 0.0397, 0.179, 0.0476, 0), (99, 100, 0.018, 0.0813, 0.0216, 0), (100, 101, 0.0277, 0.1262, 0.0328, 0),
    (92, 102, 0.0123, 0.0559, 0.01464, 0), (101, 102, 0.0246, 0.112, 0.0294, 0), (100, 103, 0.016, 0.0525, 0.0536, 0), (100, 104, 0.0451, 0.204, 0.0541, 0),
    (103, 104, 0.0466, 0.1584, 0.0407, 0), (103, 105, 0.0535, 0.1625, 0.0408, 0), (100, 106, 0.0605, 0.229, 0.062, 0), (104, 105, 0.00994, 0.0378, 0.00986, 0),
    (105, 106, 0.014, 0.0547, 0.01434, 0), (105, 107, 0.053, 0.183, 0.0472, 0), (105, 108, 0.0261, 0.0703, 0.01844, 0), (106, 107, 0.053, 0.183, 0.0472, 0),
    (108, 109, 0.0105, 0.0288, 0.0076, 0), (103, 110, 0.03906, 0.1813, 0.0461, 0), (109, 110, 0.0278, 0.0762, 0.0202, 0), (110, 111, 0.022, 0.0755, 0.02, 0),
    (110, 112, 0.0247, 0.064, 0.062, 0), (17, 113, 0.00913, 0.0301, 0.00768, 0), (32, 113, 0.0615, 0.203, 0.0518, 0), (32, 114, 0.0135, 0.0612, 0.01628, 0),
    (27, 115, 0.0164, 0.0741, 0.01972, 0), (114, 115, 0.0023, 0.0104, 0.00276, 0), (68, 116, 0.00034, 0.00405, 0.164, 0), (12, 117, 0.0329, 0.14, 0.0358, 0),
    (75, 118, 0.0145, 0.0481, 0.01198, 0), (76, 118, 0.0164, 0.0544, 0.01356, 0),
]

# bus, P (MW), V (p.u.): AC optimal power flow of the existing network closest to the
# proportionally scaled case dispatch
SET_POINTS = [
    (1, 0.63, 0.9606), (4, 0.53, 0.9775), (6, 0.49, 0.9868), (8, 0.00, 0.9500),
    (10, 290.32, 0.9711), (12, 73.33, 0.9926), (15, 2.71, 1.0061), (18, 3.00, 1.0145),
    (19, 3.40, 1.0054), (24, 16.28, 0.9500), (25, 165.76, 0.9812), (26, 252.29, 1.0008),
    (27, 15.04, 0.9500), (31, 16.45, 0.9803), (32, 13.45, 0.9603), (34, 1.97, 1.0188),
    (36, 1.96, 1.0172), (40, 2.49, 1.0500), (42, 3.10, 0.9500), (46, 20.30, 0.9706),
    (49, 178.05, 0.9605), (54, 45.10, 0.9813), (55, 4.16, 0.9783), (56, 4.17, 0.9780),
    (59, 136.04, 0.9936), (61, 140.14, 0.9672), (62, 3.68, 0.9622), (65, 337.09, 0.9974),
    (66, 337.72, 0.9708), (69, 445.25, 1.0500), (70, 7.75, 1.0031), (72, 12.09, 0.9953),
    (73, 8.45, 1.0071), (74, 6.69, 0.9952), (76, 5.86, 0.9900), (77, 4.90, 1.0327),
    (80, 411.50, 1.0500), (85, 1.10, 1.0162), (87, 4.46, 1.0500), (89, 511.25, 1.0141),
    (90, 0.75, 1.0500), (91, 2.99, 0.9919), (92, 6.57, 0.9973), (99, 5.39, 1.0046),
    (100, 220.51, 0.9947), (103, 39.86, 0.9883), (104, 5.87, 0.9798), (105, 5.92, 0.9775),
    (107, 6.06, 0.9665), (110, 5.98, 0.9758), (111, 36.58, 0.9851), (112, 6.15, 0.9632),
    (113, 3.73, 1.0500), (116, 4.18, 0.9952),
]

PENALTIES = {"eta": 4.5e3, "kappa_v": 1.8e4, "kappa_flow": 4.5e3, "kappa_qgen": 4.5e3,
             "kappa_pgen": 4.5e3, "kappa_qreac": 4.5e3, "kappa_l": 1.8e4, "infeasible": 1.0e7}

KIND = {3: "slack", 2: "pv", 1: "pq"}


def corridors():
    kv = {b[0]: b[6] for b in BUSES}
    groups = {}
    for f, t, r, x, b, tap in BRANCHES:
        groups.setdefault((f, t), []).append((r, x, b, tap))
    out = []
    for n, ((f, t), items) in enumerate(groups.items()):
        k = len(items)
        # one circuit of the merged corridor: k of them in parallel reproduce the group
        y = sum(1 / complex(r, x) for r, x, _, _ in items) / k
        z = 1 / y
        b_total = sum(b for _, _, b, _ in items) / k
        transformer = any(tap != 0 for *_, tap in items) or kv[f] != kv[t]
        rating = 500 if transformer or kv[f] == 345 else 175
        out.append({"id": n + 1, "from_bus": f, "to_bus": t, "r": round(z.real, 6), "x": round(z.imag, 6),
                    "b_shunt": round(b_total, 6), "rating": RATING_FACTOR * rating / 100,
                    "circuit_cost": round(COST_PER_X * z.imag, 4), "existing": k, "max_new": 2})
    return out


def case():
    p_scale = LOAD_MW / sum(b[2] for b in BUSES)
    q_scale = LOAD_MVAR / sum(b[3] for b in BUSES)
    cap_scale = CAPACITY_MW / sum(g[5] for g in GENS)
    v_set = {b: v for b, _, v in SET_POINTS}
    p_set = {b: p for b, p, _ in SET_POINTS}
    buses = []
    for i, k, pd, qd, _, bs, _ in BUSES:
        q = (q_scale * qd - bs) / 100
        if k == 1:
            q = max(q, 0.0)
        buses.append({"id": i, "kind": KIND[k], "p_demand": round(p_scale * pd / 100, 6), "q_demand": round(q, 6),
                      "v_setpoint": v_set.get(i, 1.0), "v_min": 0.95, "v_max": 1.05})
    gens = []
    for bus, _, qmax, qmin, _, pmax, _ in GENS:
        p_max = cap_scale * pmax / 100
        gens.append({"bus": bus, "p_min": 0.0, "p_max": round(p_max, 6), "q_min": qmin / 100, "q_max": qmax / 100,
                     "participation": 1.0, "p_dispatch": round(min(p_set[bus] / 100, p_max), 6)})
    return {
        "schema_version": "tnep-case/1",
        "name": "ieee118",
        "base_mva": 100.0,
        "currency_unit": "1e6 USD",
        "limits": {"v_min": 0.95, "v_max": 1.05, "l_min": 0.0, "l_max": 0.45},
        "buses": buses,
        "generators": gens,
        "corridors": corridors(),
        "reactive_candidates": [],
        "penalties": PENALTIES,
    }


if __name__ == "__main__":
    path = OUT / "ieee118.json"
    path.write_text(json.dumps(case(), indent=1) + "\n")
    print(path)
