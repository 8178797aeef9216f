"""The LLM protocols, demonstrated offline against a scripted transport.

Shows the anonymized in-context classification prompt, the stopping rule on
the running-accuracy curve, and the two-step summarization flow.  Swap the
MockTransport for HttpTransport (endpoint/token via environment variables)
to run the same protocols against a live chat-completion service.

Run: python demos/05_llm_mock_protocol.py
"""

import numpy as np

from biaslens.llm import (
    IclConfig,
    MockTransport,
    build_icl_prompt,
    run_icl_eval,
    summarize_datasets,
)

THEMES = {
    "hikes": "a trail winding through {} under a wide sky",
    "meals": "a plate of {} on a rustic wooden table",
    "gadgets": "a product shot of a {} on a white background",
}
WORDS = {
    "hikes": ["pines", "boulders", "ferns", "switchbacks", "scree"],
    "meals": ["dumplings", "stew", "flatbread", "noodles", "greens"],
    "gadgets": ["headset", "charger", "keyboard", "tripod", "speaker"],
}


def caption_sets(per_dataset=40, seed=3):
    rng = np.random.default_rng(seed)
    sets = []
    for name in THEMES:
        sets.append([
            THEMES[name].format(WORDS[name][int(i)])
            for i in rng.integers(0, 5, per_dataset)
        ])
    return sets


def main():
    sets = caption_sets()
    cfg = IclConfig(demos_per_dataset=5, stop_window=12, stop_epsilon=0.02)

    prompt, answer_key = build_icl_prompt(sets, sets[0][-1], 0, cfg, seed=1)
    print("=== anonymized ICL prompt (truncated) ===")
    print("\n".join(prompt.splitlines()[:10]))
    print(f"... [{len(prompt.splitlines())} lines total, answer key = {answer_key}]")

    # a mock that guesses the distribution whose demos share the most words
    # with the query caption (a crude but honest in-context learner)
    def themed_reply(prompt_text):
        body, query = prompt_text.rsplit("caption:", 1)
        query_words = set(query.split())
        best, best_overlap = 1, -1
        for header_idx in (1, 2, 3):
            section = body.split(f"distribution {header_idx}:")[1].split("distribution")[0]
            overlap = len(query_words & set(section.split()))
            if overlap > best_overlap:
                best, best_overlap = header_idx, overlap
        return str(best)

    result = run_icl_eval(sets, MockTransport(reply_fn=themed_reply), cfg, seed=2)
    print("\n=== in-context classification ===")
    print(f"holdouts evaluated: {result.n_holdouts} "
          f"(stopped early: {result.stopped_early})")
    print(f"final accuracy: {result.final_accuracy:.3f}")
    curve = ", ".join(f"{a:.2f}" for a in result.curve[:10])
    print(f"running accuracy (first 10): {curve}")

    step1 = "\n".join(
        f"distribution {pos}: mentions {word} imagery"
        for pos, word in ((1, "outdoor"), (2, "food"), (3, "product"))
        for _ in range(2)
    )
    step2_lines = []
    for pos in (1, 2, 3):
        step2_lines.append(f"distribution {pos}:")
        step2_lines += [f"- condensed point {pos}.{i}" for i in range(5)]
    transport = MockTransport(responses=[step1] * 4 + ["\n".join(step2_lines)])
    summary = summarize_datasets(
        sets, transport, iterations=4, captions_per_iteration=10,
        patterns_per_dataset=2, seed=5,
    )
    print("\n=== two-step summarization ===")
    for d, name in enumerate(THEMES):
        print(f"  {name}: {len(summary.patterns[d])} mined patterns -> "
              f"{len(summary.bullets[d])} bullets")


if __name__ == "__main__":
    main()
