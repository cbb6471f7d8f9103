"""k-NN accuracy on spectral features of each method's approximation.

Without ``--in`` the synthetic 3-class stack is used; with ``--in`` and
``--labels`` (``pixel_index,class``) a real image cube is classified using
rank (16, 16, 16) and CP rank 16.
"""

import argparse

from nlrt import baselines as bl
from nlrt.analysis import LabeledPixels, hsi_like, knn_classify, spectral_features, split_per_class
from nlrt.fileio import read_labels, read_tensor
from nlrt.solver import SolverConfig, nlrt_approximate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--in", dest="input")
    ap.add_argument("--labels")
    ap.add_argument("--rank", type=int, default=16)
    ap.add_argument("--per-class", default="10,20,30")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if args.input:
        a = read_tensor(args.input)
        pix, cls = read_labels(args.labels)
    else:
        a, cls = hsi_like((24, 24, 32), 3, seed=args.seed)
        pix = range(len(cls))
    r = args.rank
    ranks = (r,) * a.ndim
    cfg = bl.FitConfig(seed=args.seed)
    models = {
        "NLRT": nlrt_approximate(a, SolverConfig(ranks=ranks)),
        "NTD-HALS": bl.ntd_hals(a, ranks, cfg)[0],
        "NCPD-HALS": bl.ncpd_hals(a, r, cfg)[0],
    }
    for name, model in models.items():
        feats = spectral_features(model, 2, 16)[0][list(pix)]
        for s in (int(x) for x in args.per_class.split(",")):
            train, test = split_per_class(cls, s, args.seed)
            data = LabeledPixels(feats, cls, train, test)
            accs = "  ".join(f"{k}-NN {100 * knn_classify(data, k):6.2f}%" for k in (1, 3, 5))
            print(f"{name:<9} s={s:<3} {accs}")


if __name__ == "__main__":
    main()
