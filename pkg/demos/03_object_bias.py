"""Object-level bias analytics on synthetic annotated datasets.

Three fake datasets draw objects from overlapping pools with different
emphases (street scenes, home interiors, product shots).  The demo prints
class-share tables, object-diversity histograms, logistic-regression
rankings, and the parameter-free majority-share classifier.

Run: python demos/03_object_bias.py
"""

import numpy as np

from biaslens.classify import TrainConfig, train
from biaslens.manifest import DatasetManifest, Sample
from biaslens.objects import (
    accuracy_vs_majority_share,
    apply_majority_rule,
    build_presence,
    class_shares,
    fit_majority_rule,
    rank_classes_by_coefficients,
    unique_object_stats,
)

VOCAB = (
    "person", "car", "tree", "traffic light", "building",
    "sofa", "table", "lamp", "plant",
    "bottle", "box", "logo", "watch",
)
POOLS = {
    "street": (["person", "car", "tree", "traffic light", "building"], 4),
    "home": (["sofa", "table", "lamp", "plant", "person"], 3),
    "catalog": (["bottle", "box", "logo", "watch"], 1),
}


def build_manifests(rng, per_dataset=400):
    manifests = []
    for name, (pool, richness) in POOLS.items():
        samples = []
        for i in range(per_dataset):
            count = 1 + int(rng.integers(0, richness + 1))
            objects = [pool[int(j)] for j in rng.integers(0, len(pool), count)]
            if rng.random() < 0.2:  # a little cross-dataset leakage
                objects.append(VOCAB[int(rng.integers(0, len(VOCAB)))])
            samples.append(Sample(
                id=f"{name}-{i}", image_path=f"{name}/{i}.png",
                object_classes=tuple(objects), single_label=objects[0],
            ))
        manifests.append(DatasetManifest(name=name, samples=tuple(samples)))
    return manifests


def main():
    rng = np.random.default_rng(5)
    manifests = build_manifests(rng)
    pm = build_presence(manifests, VOCAB)

    table = class_shares(pm, min_support=20)
    print("top classes by dataset share (share, support):")
    for d, m in enumerate(manifests):
        tops = ", ".join(
            f"{name} ({share:.2f}, n={support})"
            for name, share, support in table.top_classes(d, 4)
        )
        print(f"  {m.name:>8}: {tops}")

    histograms, means = unique_object_stats(pm)
    print("\nunique objects per image:")
    for d, m in enumerate(manifests):
        print(f"  {m.name:>8}: mean {means[d]:.2f}  histogram {histograms[d].tolist()}")

    model = train(
        pm.matrix.astype(float), pm.dataset_labels, TrainConfig(seed=2),
        class_names=[m.name for m in manifests],
    )
    rankings = rank_classes_by_coefficients(model, pm, min_frequency=20)
    print("\nregression-coefficient rankings (top 4):")
    for d, m in enumerate(manifests):
        names = ", ".join(name for name, _ in rankings[d][:4])
        print(f"  {m.name:>8}: {names}")

    labels = [s.single_label for m in manifests for s in m.samples]
    datasets = pm.dataset_labels
    rule = fit_majority_rule(labels, datasets, n_datasets=3)
    preds, accuracy, unseen = apply_majority_rule(rule, labels, datasets)
    print(f"\nmajority-share rule: training accuracy {accuracy:.3f}"
          f" (chance 0.333), unseen labels: {unseen or 'none'}")

    stats = accuracy_vs_majority_share(preds, datasets, labels, 3, min_support=20)
    print(f"share-vs-accuracy Pearson r = {stats.r:.3f} over {len(stats.labels)} labels")


if __name__ == "__main__":
    main()
