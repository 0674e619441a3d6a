#!/usr/bin/env python3
"""Writes data/reference_catalog.json.

Four skills, seven difficulty levels per skill. Each level offers one video,
one reading, one exercise and two practice quizzes, so most content is
assessed. Items at level 3 and above require 0.3 mastery of each parent skill.
"""
import json
import pathlib

SKILLS = {
    "arithmetic": [],
    "fractions": ["arithmetic"],
    "geometry": ["arithmetic"],
    "algebra": ["fractions"],
}
LEVELS = [0.10, 0.23, 0.37, 0.50, 0.63, 0.77, 0.90]
KINDS = [
    ("video", "video", 8),
    ("reading", "text", 10),
    ("exercise", "exercise", 12),
    ("quiz-a", "quiz", 5),
    ("quiz-b", "quiz", 5),
]
PARENT_THRESHOLD = 0.3


def main():
    items = []
    for skill, parents in SKILLS.items():
        for level, difficulty in enumerate(LEVELS, start=1):
            prereqs = {p: PARENT_THRESHOLD for p in parents} if level >= 3 else {}
            for suffix, modality, minutes in KINDS:
                items.append({
                    "id": f"{skill}-l{level}-{suffix}",
                    "skills": {skill: 1.0},
                    "difficulty": difficulty,
                    "modality": modality,
                    "duration_minutes": minutes,
                    "prerequisites": prereqs,
                })
    doc = {
        "skills": [{"id": s, "prerequisites": p} for s, p in SKILLS.items()],
        "items": items,
    }
    out = pathlib.Path(__file__).resolve().parent.parent / "data" / "reference_catalog.json"
    out.write_text(json.dumps(doc, indent=2) + "\n")
    print(f"{len(items)} items -> {out}")


if __name__ == "__main__":
    main()
