"""
Published reference results for the benchmark suites.

Accuracy rows hold (mean trace correlation, reported deviation) for
models 1-4. Dimension rows hold the frequencies (K < true, K = true,
K > true) with H = 10. Housing rows hold (MSE, deviation) followed by
the four direction correlations and their weighted average.
"""

from typing import Optional


# (H, label) -> ((mean, dev) for models 1..4)
TRACE_CORRELATION = {
    (5, "SIR"): ((0.9822, 0.0013), (0.8658, 0.0103), (0.7188, 0.0115), (0.6968, 0.0117)),
    (5, "OSIR_1"): ((0.9821, 0.0013), (0.8734, 0.0094), (0.7419, 0.0099), (0.7261, 0.0101)),
    (5, "OSIR_2"): ((0.9821, 0.0013), (0.8724, 0.0094), (0.7489, 0.0096), (0.7355, 0.0097)),
    (5, "OSIR_3"): ((0.9827, 0.0013), (0.8730, 0.0094), (0.7471, 0.0098), (0.7327, 0.0099)),
    (5, "OSIR_4"): ((0.9827, 0.00123), (0.8730, 0.0094), (0.7471, 0.0098), (0.7327, 0.0099)),
    (10, "SIR"): ((0.9855, 0.0011), (0.8689, 0.0113), (0.7296, 0.0122), (0.7288, 0.1230)),
    (10, "OSIR_1"): ((0.9862, 0.0010), (0.8916, 0.0082), (0.7709, 0.0101), (0.7658, 0.0103)),
    (10, "OSIR_2"): ((0.9859, 0.0010), (0.8921, 0.0081), (0.7775, 0.0094), (0.7726, 0.0095)),
    (10, "OSIR_3"): ((0.9855, 0.0011), (0.8902, 0.0083), (0.7813, 0.0090), (0.7762, 0.0090)),
    (10, "OSIR_4"): ((0.9853, 0.0011), (0.8888, 0.0084), (0.7855, 0.0086), (0.7813, 0.0087)),
    (10, "OSIR_5"): ((0.9854, 0.0011), (0.8879, 0.0084), (0.7894, 0.0086), (0.7862, 0.0085)),
    (10, "OSIR_6"): ((0.9856, 0.0011), (0.8878, 0.0085), (0.7920, 0.0085), (0.7900, 0.0084)),
    (10, "OSIR_7"): ((0.9859, 0.0010), (0.8881, 0.0085), (0.7924, 0.0085), (0.7903, 0.0085)),
    (10, "OSIR_8"): ((0.9861, 0.0010), (0.8885, 0.0084), (0.7908, 0.0086), (0.7879, 0.0086)),
    (10, "OSIR_9"): ((0.9861, 0.0010), (0.8885, 0.0084), (0.7908, 0.0086), (0.7879, 0.0086)),
    (None, "CUME"): ((0.9844, 0.0012), (0.8781, 0.0091), (0.7802, 0.0088), (0.7760, 0.0089)),
}

# label -> ((under, exact, over) for models 1..4), H = 10
DIMENSION_FREQUENCIES = {
    "SIR": ((0, 0.698, 0.320), (0, 0.056, 0.944), (0, 0.194, 0.806), (0, 0.189, 0.811)),
    "OSIR_1": ((0, 0.896, 0.104), (0, 0.203, 0.797), (0, 0.473, 0.527), (0, 0.513, 0.487)),
    "OSIR_2": ((0, 0.938, 0.062), (0, 0.337, 0.663), (0, 0.702, 0.298), (0, 0.772, 0.228)),
    "OSIR_3": ((0, 0.958, 0.042), (0, 0.422, 0.578), (0, 0.886, 0.114), (0.002, 0.923, 0.075)),
    "OSIR_4": ((0, 0.972, 0.028), (0, 0.521, 0.479), (0, 0.956, 0.044), (0.004, 0.976, 0.020)),
    "OSIR_5": ((0, 0.986, 0.014), (0, 0.574, 0.426), (0, 0.975, 0.025), (0.008, 0.984, 0.008)),
    "OSIR_6": ((0, 0.993, 0.007), (0, 0.618, 0.382), (0.001, 0.982, 0.017), (0.012, 0.986, 0.002)),
    "OSIR_7": ((0, 0.994, 0.006), (0, 0.629, 0.371), (0.002, 0.977, 0.021), (0.016, 0.981, 0.003)),
    "OSIR_8": ((0, 0.994, 0.006), (0, 0.611, 0.389), (0.002, 0.965, 0.033), (0.018, 0.975, 0.007)),
    "OSIR_9": ((0, 0.991, 0.009), (0, 0.568, 0.432), (0, 0.958, 0.042), (0.013, 0.973, 0.014)),
    "CUME": ((0, 1, 0), (0, 1, 0), (0.999, 0.001, 0), (1, 0, 0)),
}

# label -> (mse, dev, corr_1, corr_2, corr_3, corr_4, weighted_average), H = 20, K = 4
HOUSING = {
    "SIR": (21.66, 0.28, 0.8290, 0.1560, 0.0929, 0.0940, 0.2933),
    "OSIR_1": (19.97, 0.28, 0.8344, 0.1558, 0.0996, 0.0881, 0.3108),
    "OSIR_2": (19.84, 0.28, 0.8358, 0.1490, 0.0984, 0.0877, 0.3207),
    "OSIR_3": (19.83, 0.27, 0.8366, 0.1437, 0.1017, 0.0917, 0.3290),
    "OSIR_5": (19.71, 0.26, 0.8373, 0.1346, 0.1118, 0.0952, 0.3419),
    "OSIR_10": (19.52, 0.25, 0.8387, 0.1224, 0.1144, 0.1030, 0.3564),
    "OSIR_15": (19.40, 0.24, 0.8413, 0.1185, 0.1058, 0.1004, 0.3363),
    "OSIR_19": (19.42, 0.25, 0.8418, 0.1179, 0.1034, 0.1008, 0.3052),
}

HOUSING_BASELINES = {
    "MLR": (21.21, 0.30),
    "kNN": (53.53, 0.59),
}


def trace_correlation_reference(slices, label: str, model_id: int) -> tuple[float, float]:
    """(mean, dev) for one accuracy cell; CUME ignores `slices`."""
    key = (None, "CUME") if label == "CUME" else (slices, label)
    return TRACE_CORRELATION[key][model_id - 1]


def dimension_reference(label: str, model_id: int) -> tuple[float, float, float]:
    """(under, exact, over) frequencies for one dimension cell."""
    return DIMENSION_FREQUENCIES[label][model_id - 1]


# Published cells the benchmark models do not reproduce. They stay in the
# reports but do not decide whether a suite passes.
DIVERGENT_ACCURACY = {
    # observed mean r about 0.73 at n=100; OSIR_1 on the same samples matches 0.8916
    (10, "SIR", 2): "SIR at H=10 on model 2 reaches about 0.73, not 0.8689",
}
DIVERGENT_DIMENSION = {
    # observed frequencies about (0, 0.93, 0.07)
    ("SIR", 1): "SIR on model 1 selects K=1 about 93% of the time, not 69.8%",
}


def accuracy_divergence(slices, label: str, model_id: int) -> Optional[str]:
    """Reason a published accuracy cell is not reproduced, or None."""
    return DIVERGENT_ACCURACY.get((slices, label, model_id))


def dimension_divergence(label: str, model_id: int) -> Optional[str]:
    """Reason a published dimension cell is not reproduced, or None."""
    return DIVERGENT_DIMENSION.get((label, model_id))
