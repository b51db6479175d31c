"""Bundled demo corpus: a deterministic dump, gazetteer, and naming file.

The generated dump retains exactly 20 posts and 100 comments after the
ingest filters and covers every (ui cluster, ve cluster) cell with at
least one co-occurring comment. Extra records exercise each drop reason.
Everything is index-cycled, never random, so repeated runs are identical.
"""

from __future__ import annotations

import json
from itertools import product
from pathlib import Path

BASE_TS = 1_700_000_000

# Family key doubles as the naming key: every member contains it as a word.
UI_FAMILIES: dict[str, list[str]] = {
    "Button": ["button", "home button", "settings button", "submit button"],
    "Icon": ["icon", "app icon", "site icon", "alert icon"],
    "Image": ["image", "hero image", "profile image", "product image"],
    "Text": ["text", "body text", "title text", "caption text"],
    "Background": ["background", "dark background", "light background"],
    "Bar&Page": ["top bar", "menu bar", "search bar", "nav bar"],
    "Decorative Element": ["divider", "section divider", "vertical divider"],
    "Interactive Card Element": ["card", "info card", "pricing card", "contact card"],
}
UI_NAMING_KEYS = {
    "Button": "button",
    "Icon": "icon",
    "Image": "image",
    "Text": "text",
    "Background": "background",
    "Bar&Page": "bar",
    "Decorative Element": "divider",
    "Interactive Card Element": "card",
}

VE_FAMILIES: dict[str, list[str]] = {
    "Color": ["color", "accent color", "brand color", "fill color"],
    "Contrast": ["contrast", "high contrast", "low contrast", "soft contrast"],
    "Space": ["spacing", "line spacing", "letter spacing", "edge spacing"],
    "Typography": ["font", "serif font", "bold font", "mono font"],
    "Layout": ["layout", "grid layout", "page layout", "split layout"],
    "Shape&Size": ["shape", "rounded shape", "organic shape", "soft shape"],
}
VE_NAMING_KEYS = {
    "Color": "color",
    "Contrast": "contrast",
    "Space": "spacing",
    "Typography": "font",
    "Layout": "layout",
    "Shape&Size": "shape",
}

# Scaffolding text must never contain a gazetteer term of its own.
PAIR_TEMPLATES = [
    "Try a softer {ve} on the {ui}.",
    "The {ui} looks lost because the {ve} fights the brand.",
    "The {ve} around the {ui} is too heavy.",
    "I would rethink the {ve} so the {ui} can breathe.",
    "Love the {ui}, but that {ve} feels busy.",
    "Consider a calmer {ve} since the {ui} carries the whole page.",
]
UI_ONLY_TEMPLATES = [
    "The {ui} anchors the top half well.",
    "Maybe shift the {ui} a touch left.",
    "That {ui} reads as clickable, which helps.",
]
VE_ONLY_TEMPLATES = [
    "Too much {ve} everywhere.",
    "The {ve} works because it stays consistent.",
    "Consider dialing the {ve} back a notch.",
]
PLAIN_BODIES = [
    "What tool did you build this with?",
    "Overall this reads clearly to me.",
    "I saw a similar flow on a banking site last week.",
    "Très soigné, j'adore l'équilibre 👌",
    "Following this thread, curious where it lands.",
]

POST_TITLES = [
    "Feedback on my landing page",
    "First pass at a checkout flow",
    "Portfolio home, too plain?",
    "Mobile dashboard redesign",
    "Onboarding screens for a habit app",
    "Pricing page, does it convert?",
    "Settings screen cleanup",
    "Music player concept",
    "Travel booking search results",
    "Recipe app home screen",
    "Analytics panel for a SaaS tool",
    "Sign-up form revamp",
    "News reader dark mode",
    "Fitness tracker summary view",
    "E-commerce product page",
    "Calendar week view",
    "Chat app thread view",
    "Banking app transfers screen",
    "Podcast directory browse page",
    "Weather widget exploration",
]

N_POSTS = 20
N_COMMENTS = 100


def demo_gazetteer_text() -> str:
    lines = ["[ui_component]"]
    for members in UI_FAMILIES.values():
        lines.extend(members)
    lines.append("")
    lines.append("[visual_element]")
    for members in VE_FAMILIES.values():
        lines.extend(members)
    return "\n".join(lines) + "\n"


def demo_naming_text() -> str:
    lines = ["[ui_component]"]
    for name, key in UI_NAMING_KEYS.items():
        lines.append(f"{key} = {name}")
    lines.append("")
    lines.append("[visual_element]")
    for name, key in VE_NAMING_KEYS.items():
        lines.append(f"{key} = {name}")
    return "\n".join(lines) + "\n"


def _post(i: int) -> dict:
    return {
        "kind": "post",
        "id": f"post{i:02d}",
        "author": f"designer{i:02d}",
        "created_utc": BASE_TS + i * 86_400,
        "title": POST_TITLES[i % len(POST_TITLES)],
        "selftext": "Any and all feedback welcome.",
        "link_flair_text": "Feedback Request",
        "image_refs": [f"https://i.redd.it/demo{i:02d}.png"],
    }


def _comment(n: int, post_index: int, body: str) -> dict:
    return {
        "kind": "comment",
        "id": f"cmt{n:03d}",
        "parent_id": f"t3_post{post_index:02d}",
        "author": f"critic{n % 17:02d}",
        "created_utc": BASE_TS + post_index * 86_400 + 600 * (n + 1),
        "body": body,
    }


def demo_records() -> list[dict]:
    records = [_post(i) for i in range(N_POSTS)]
    ui_names = list(UI_FAMILIES)
    ve_names = list(VE_FAMILIES)

    bodies: list[tuple[int, str]] = []  # (post_index, body)
    # One comment per (ui, ve) cell, spread across posts round-robin.
    for cell, (ui_name, ve_name) in enumerate(product(ui_names, ve_names)):
        ui_term = UI_FAMILIES[ui_name][cell % len(UI_FAMILIES[ui_name])]
        ve_term = VE_FAMILIES[ve_name][cell % len(VE_FAMILIES[ve_name])]
        template = PAIR_TEMPLATES[cell % len(PAIR_TEMPLATES)]
        extra = PLAIN_BODIES[cell % len(PLAIN_BODIES)] if cell % 3 == 0 else ""
        body = template.format(ui=ui_term, ve=ve_term)
        if extra:
            body = body + " " + extra
        bodies.append((cell % N_POSTS, body))
    # Fill the rest with single-kind and plain comments.
    n_fill = N_COMMENTS - len(bodies)
    for j in range(n_fill):
        post_index = (len(bodies) + j) % N_POSTS
        variant = j % 4
        if variant == 0:
            family = UI_FAMILIES[ui_names[j % len(ui_names)]]
            body = UI_ONLY_TEMPLATES[j % len(UI_ONLY_TEMPLATES)].format(ui=family[j % len(family)])
        elif variant == 1:
            family = VE_FAMILIES[ve_names[j % len(ve_names)]]
            body = VE_ONLY_TEMPLATES[j % len(VE_ONLY_TEMPLATES)].format(ve=family[j % len(family)])
        elif variant == 2:
            ui_f = UI_FAMILIES[ui_names[(j + 3) % len(ui_names)]]
            ve_f = VE_FAMILIES[ve_names[(j + 1) % len(ve_names)]]
            body = (
                PAIR_TEMPLATES[(j + 2) % len(PAIR_TEMPLATES)].format(
                    ui=ui_f[j % len(ui_f)], ve=ve_f[j % len(ve_f)]
                )
                + " "
                + PAIR_TEMPLATES[(j + 4) % len(PAIR_TEMPLATES)].format(
                    ui=ui_f[(j + 1) % len(ui_f)], ve=ve_f[(j + 1) % len(ve_f)]
                )
            )
        else:
            body = PLAIN_BODIES[j % len(PLAIN_BODIES)]
        bodies.append((post_index, body))

    for n, (post_index, body) in enumerate(bodies):
        records.append(_comment(n, post_index, body))

    # Drop-case records: every ingest filter fires at least once.
    records.append(
        {
            "kind": "post",
            "id": "drop_flair",
            "author": "designer90",
            "created_utc": BASE_TS,
            "title": "Show and tell",
            "link_flair_text": "Showcase",
            "image_refs": ["https://i.redd.it/drop1.png"],
        }
    )
    records.append(_comment(900, 0, "orphaned by flair") | {"parent_id": "t3_drop_flair"})
    records.append(
        {
            "kind": "post",
            "id": "drop_noimage",
            "author": "designer91",
            "created_utc": BASE_TS,
            "title": "Text-only question",
            "link_flair_text": "Feedback Request",
            "selftext": "no picture here",
        }
    )
    records.append(_comment(901, 0, "orphaned by image rule") | {"parent_id": "t3_drop_noimage"})
    records.append(
        {
            "kind": "post",
            "id": "drop_botonly",
            "author": "designer92",
            "created_utc": BASE_TS,
            "title": "Bot graveyard",
            "link_flair_text": "Feedback Request",
            "image_refs": ["https://i.redd.it/drop3.png"],
        }
    )
    records.append(
        _comment(902, 0, "I am a bot, beep.")
        | {"parent_id": "t3_drop_botonly", "author": "AutoModerator"}
    )
    records.append(
        _comment(903, 0, "Thanks everyone, OP here.") | {"author": "designer00"}
    )
    records.append(_comment(904, 0, "[deleted]"))
    return records


def demo_dump_text() -> str:
    return "\n".join(json.dumps(r, sort_keys=True) for r in demo_records()) + "\n"


def write_demo_assets(workdir: str | Path) -> dict[str, Path]:
    """Write dump/gazetteer/naming into workdir; returns their paths."""
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    paths = {
        "dump": workdir / "demo_dump.jsonl",
        "gazetteer": workdir / "demo_gazetteer.txt",
        "naming": workdir / "demo_naming.txt",
    }
    paths["dump"].write_text(demo_dump_text(), encoding="utf-8")
    paths["gazetteer"].write_text(demo_gazetteer_text(), encoding="utf-8")
    paths["naming"].write_text(demo_naming_text(), encoding="utf-8")
    return paths
