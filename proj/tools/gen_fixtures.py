#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Writes the demo dataset, function registry, mock script and backend profile.

Output is deterministic; rerun after editing the tables below.
"""

import argparse
import json
import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent

SHOP_ITEMS = [
    ("Ember Lantern", "tool", "A brass lantern whose wick never gutters. 40 silver."),
    ("Wayfarer Boots", "armor", "Oiled leather boots for long roads. 25 silver."),
    ("Copper Kettle", "tool", "Dented but watertight. 6 silver."),
    ("Rope of Thirty Fathoms", "tool", "Hemp rope, tarred against rot. 9 silver."),
    ("Salted Venison", "food", "Three days of rations, wrapped in cloth. 4 silver."),
    ("Tin Compass", "tool", "Points true unless held near iron. 18 silver."),
    ("Wool Blanket", "gear", "Heavy grey wool from the valley farms. 7 silver."),
    ("Flint Striker", "tool", "Steel and flint in a pouch. 2 silver."),
    ("Honey Cakes", "food", "A dozen cakes baked this morning. 3 silver."),
    ("Traveler's Map", "document", "Shows roads as far as the river fork. 12 silver."),
    ("Waterskin", "gear", "Goat leather, holds two days of water. 5 silver."),
    ("Bone Dice", "curio", "A carved set of six. 1 silver."),
    ("Oak Walking Staff", "gear", "Shod with iron at the foot. 8 silver."),
    ("Candle Bundle", "gear", "Ten tallow candles. 2 silver."),
    ("Fishing Hook Set", "tool", "Twenty hooks and a spool of line. 3 silver."),
    ("Clay Pipe", "curio", "Long stem, plain bowl. 2 silver."),
    ("Thread and Needle", "tool", "For mending cloaks and sails. 1 silver."),
    ("Pickled Onions", "food", "A sealed jar from the coast. 2 silver."),
    ("Leather Satchel", "gear", "Two buckles and a shoulder strap. 14 silver."),
    ("Signal Whistle", "tool", "Carries across open fields. 3 silver."),
]

SMITH_ITEMS = [
    ("Iron Longsword", "weapon", "Balanced blade, plain crossguard. 90 silver."),
    ("Steel Buckler", "armor", "Small round shield with a boss. 45 silver."),
    ("Chain Coif", "armor", "Riveted rings covering neck and scalp. 60 silver."),
    ("Horseshoe Set", "tool", "Four shoes with nails. 10 silver."),
    ("War Hammer", "weapon", "Square head, ash haft. 75 silver."),
    ("Whetstone", "tool", "Fine grit, keeps an edge keen. 3 silver."),
    ("Hand Axe", "weapon", "Short haft, good for wood or combat. 30 silver."),
    ("Iron Gauntlets", "armor", "Jointed plates over padded gloves. 55 silver."),
    ("Spear Head", "weapon", "Leaf-shaped, socketed. 20 silver."),
    ("Anvil Charm", "curio", "A thumb-sized anvil on a cord. 4 silver."),
    ("Bronze Helm", "armor", "Old style with a nose guard. 50 silver."),
    ("Crossbow Bolts", "ammunition", "A bundle of twenty. 12 silver."),
    ("Tongs", "tool", "Long reach for the forge. 8 silver."),
    ("Dagger of the Marsh", "weapon", "Slim blade blued by bog water. 35 silver."),
    ("Padded Gambeson", "armor", "Quilted linen, worn under mail. 28 silver."),
    ("Mace", "weapon", "Flanged head on an iron shaft. 40 silver."),
    ("Lock and Key", "tool", "Sturdy padlock with two keys. 15 silver."),
    ("Nail Keg", "tool", "Two hundred square nails. 9 silver."),
    ("Greaves", "armor", "Shin guards with leather straps. 32 silver."),
    ("Forge Apron", "gear", "Thick hide, scorched at the hem. 11 silver."),
]

HERB_ITEMS = [
    ("Moonpetal", "herb", "Pale flower that eases fever when steeped. 6 silver."),
    ("Bitterroot", "herb", "Chewed to dull toothache. 2 silver."),
    ("Sunleaf Salve", "remedy", "Soothes burns and rashes. 9 silver."),
    ("Crowfoot Tincture", "remedy", "Three drops calm a racing heart. 15 silver."),
    ("Dried Nettle", "herb", "Brewed as a tea for the joints. 1 silver."),
    ("Lavender Sachet", "curio", "Keeps moths from linen. 2 silver."),
    ("Sleepwort Draught", "remedy", "Brings deep sleep within the hour. 12 silver."),
    ("Wolfsbane", "herb", "Poisonous; sold only to hunters. 20 silver."),
    ("Honeyed Syrup", "remedy", "For coughs and sore throats. 5 silver."),
    ("Yarrow Bundle", "herb", "Packed into wounds to slow bleeding. 3 silver."),
    ("Mint Oil", "remedy", "Rubbed on temples for headache. 4 silver."),
    ("Mortar and Pestle", "tool", "Grey stone, well used. 10 silver."),
    ("Willow Bark", "herb", "Steeped against aches. 2 silver."),
    ("Clover Tea", "food", "A sweet blend for guests. 2 silver."),
    ("Foxglove Powder", "remedy", "Strong heart medicine, measured by the pinch. 25 silver."),
    ("Marsh Reed", "herb", "Burned to clear stale air. 1 silver."),
    ("Glass Vials", "tool", "A box of six stoppered vials. 6 silver."),
    ("Thyme Sprig", "herb", "Kitchen herb with a sharp scent. 1 silver."),
    ("Amber Resin", "remedy", "Sealant for cuts on the trail. 8 silver."),
    ("Seed Pouch", "gear", "Mixed seeds for a kitchen garden. 3 silver."),
]

GATE_ITEMS = [
    ("Travel Writ", "document", "A sealed letter allowing passage through the city gates."),
    ("Gate Ledger", "document", "Records of everyone who passed the gate this week."),
    ("Curfew Bell", "landmark", "Rung at the tenth hour; the gates close after."),
    ("Watch Halberd", "weapon", "Standard issue for the city watch."),
    ("Toll Chest", "container", "Holds the copper tolls; opened each evening."),
    ("Barracks Key", "key", "Opens the watch barracks door."),
    ("Wanted Poster", "document", "A smuggler called Ferret, reward 50 silver."),
    ("Signal Horn", "tool", "Three blasts call the reserve."),
    ("Portcullis Winch", "mechanism", "Raises the north portcullis; needs two guards."),
    ("Lamp Post", "landmark", "Lit at dusk by the lamplighter."),
    ("Guard Roster", "document", "Names and shifts of the watch."),
    ("Confiscated Crate", "container", "Seized contraband awaiting the magistrate."),
    ("Stable Token", "token", "Lets travelers stable horses outside the walls."),
    ("Merchant Seal", "token", "Wax seal of the merchant guild."),
    ("Watchtower", "landmark", "Overlooks the east road."),
    ("Rain Cloak", "gear", "Oilcloth cloak worn on night watch."),
    ("Prisoner Cart", "vehicle", "Iron-barred cart for transporting prisoners."),
    ("Milestone", "landmark", "Marks ten leagues to the capital."),
    ("Bridge Toll Sign", "document", "Lists fares for crossing the river bridge."),
    ("Lantern Pole", "tool", "Long pole with a hook for lamps."),
]

LIBRARY_ITEMS = [
    ("Chronicle of the First Kings", "book", "Annals of the founding dynasty."),
    ("Atlas of the Western Reach", "book", "Hand-drawn maps of the western provinces."),
    ("Herbarium Volume III", "book", "Pressed plants with notes on their uses."),
    ("Star Chart", "scroll", "Constellations as seen from the tower roof."),
    ("Ledger of Debts", "book", "Old accounts of the trading houses."),
    ("Treatise on Tides", "book", "Why the sea rises twice a day."),
    ("Songbook of the Vale", "book", "Folk songs with melody marks."),
    ("Bestiary", "book", "Drawings of beasts real and rumored."),
    ("Reading Lens", "tool", "Polished glass for small script."),
    ("Ink Well", "tool", "Iron gall ink, half full."),
    ("Quill Case", "tool", "Goose quills in a lacquered box."),
    ("Catalogue Cards", "document", "Index of every shelf in the archive."),
    ("Sealed Codex", "book", "Locked with a clasp; the key is lost."),
    ("Almanac", "book", "Planting days and feast days for the year."),
    ("Genealogy Scroll", "scroll", "Family lines of the river lords."),
    ("Primer of Letters", "book", "Teaches children to read."),
    ("Map Tube", "container", "Leather tube for rolled maps."),
    ("Founders Plaque", "landmark", "Bronze plaque naming the archive's patrons."),
    ("Reading Desk", "furniture", "Slanted desk by the east window."),
    ("Dust Brush", "tool", "Soft brush for old bindings."),
]

CONVERSATIONS = [
    {
        "id": "merchant_ada",
        "function_list_id": "fl_shop",
        "worldview": "The river town of Hollowmere sits where three trade roads cross. "
                     "Caravans arrive each spring and leave before the autumn floods.",
        "persona": {"name": "Ada Brightwater", "age": "52", "gender": "female",
                    "occupation": "general goods merchant",
                    "appearance": "silver braid, ink-stained fingers, a green apron"},
        "role": "a shrewd but fair shopkeeper who remembers every customer",
        "state": {"location": "Brightwater Sundries, Hollowmere", "time": "late morning",
                  "weather": "light drizzle"},
        "general": [("Trade", "Coin is counted in silver; copper is accepted at the gate.")],
        "items": SHOP_ITEMS,
        "turns": [
            ("Good morning. What do you sell here?",
             "Everything a traveler needs, from rope to rations. Look around.", []),
            ("How much is the Ember Lantern?",
             "The Ember Lantern is forty silver. Its wick never gutters.",
             [("get_item_info", {"item_name": "Ember Lantern"})]),
            ("I'll take two Waterskin then.",
             "Two waterskins, that's ten silver. Here you go.",
             [("sell", {"item_name": "Waterskin", "quantity": 2})]),
            ("Do you have any dragon scales?",
             "Dragon scales? Never had them and never will.",
             [("get_item_info", {"item_name": "Dragon Scale"})]),
        ],
    },
    {
        "id": "smith_borin",
        "function_list_id": "fl_shop",
        "worldview": "Ironvale is a mining valley ringed by snowy peaks. "
                     "Its forges supply the border forts with arms.",
        "persona": {"name": "Borin Ashhand", "age": "47", "gender": "male",
                    "occupation": "blacksmith",
                    "appearance": "broad shoulders, singed beard, leather cap"},
        "role": "a gruff smith proud of honest steel",
        "state": {"location": "Ashhand Forge, Ironvale", "time": "noon",
                  "weather": "cold and clear"},
        "general": [("Forge", "Orders take three days unless paid double.")],
        "items": SMITH_ITEMS,
        "turns": [
            ("Is this forge open?",
             "Open as long as the coals are hot. What do you need?", []),
            ("Tell me about the Dagger of the Marsh.",
             "Slim blade, blued by bog water. Thirty-five silver.",
             [("get_item_info", {"item_name": "Dagger of the Marsh"})]),
            ("Sell me a Whetstone.",
             "One whetstone, three silver. Keep your edge keen.",
             [("sell", {"item_name": "Whetstone", "quantity": 1})]),
        ],
    },
    {
        "id": "herbalist_celia",
        "function_list_id": "fl_shop",
        "worldview": "Fernhollow is a village at the edge of an ancient wood. "
                     "Villagers trust remedies over priests.",
        "persona": {"name": "Celia Thornbury", "age": "29", "gender": "female",
                    "occupation": "herbalist",
                    "appearance": "freckled, straw hat, sleeves rolled to the elbow"},
        "role": "a cheerful healer who worries about everyone",
        "state": {"location": "Thornbury Garden, Fernhollow", "time": "dusk",
                  "weather": "warm and humid"},
        "general": [("Healing", "Poisons are sold only to licensed hunters.")],
        "items": HERB_ITEMS,
        "turns": [
            ("My head is pounding. Any ideas?",
             "Mint oil on the temples usually helps. Let me look.",
             [("get_item_info", {"item_name": "Mint Oil"})]),
            ("I'll buy that and some Willow Bark.",
             "Mint oil and willow bark, six silver together.",
             [("sell", {"item_name": "Mint Oil", "quantity": 1}),
              ("sell", {"item_name": "Willow Bark", "quantity": 1})]),
            ("Thanks, have a good evening.",
             "You too. Drink plenty of water tonight.", []),
        ],
    },
    {
        "id": "guard_dorian",
        "function_list_id": "fl_gate",
        "worldview": "Kestrel Keep is a walled city under martial law since the harvest riots. "
                     "The watch answers only to the magistrate.",
        "persona": {"name": "Dorian Vale", "age": "34", "gender": "male",
                    "occupation": "gate sergeant of the city watch",
                    "appearance": "dented breastplate, scar across the chin"},
        "role": "a strict but tired gate sergeant",
        "state": {"location": "North Gate, Kestrel Keep", "time": "night",
                  "weather": "windy"},
        "general": [("Law", "Nobody passes after curfew without a writ.")],
        "items": GATE_ITEMS,
        "turns": [
            ("Open the gate, please.",
             "Not without a writ. Curfew rang an hour ago.", []),
            ("Here is my Travel Writ.",
             "The seal is genuine. Opening the north gate.",
             [("get_item_info", {"item_name": "Travel Writ"}),
              ("open_gate", {"gate": "north"})]),
            ("Who is on the Wanted Poster?",
             "A smuggler called Ferret. Fifty silver reward.",
             [("get_item_info", {"item_name": "Wanted Poster"})]),
        ],
    },
    {
        "id": "librarian_elowen",
        "function_list_id": "fl_lore",
        "worldview": "The Archive of Saltspire is the last library on the coast. "
                     "Scholars cross the sea to read its shelves.",
        "persona": {"name": "Elowen Marsh", "age": "61", "gender": "female",
                    "occupation": "archivist",
                    "appearance": "spectacles on a chain, grey shawl"},
        "role": "a soft-spoken archivist who quotes old books",
        "state": {"location": "Reading Hall, Saltspire", "time": "early afternoon",
                  "weather": "sea fog"},
        "general": [("Rules", "No candles near the shelves.")],
        "items": LIBRARY_ITEMS,
        "turns": [
            ("Hello, is the archive open to visitors?",
             "It is. Please speak softly and keep candles away.", []),
            ("What should a newcomer read first?",
             "Begin with the annals of the founding dynasty, then the sea.", []),
            ("Thank you, I will come back tomorrow.",
             "The doors open at the second bell. Safe travels.", []),
        ],
    },
]

ITEM_PARAM = {"type": "string", "description": "Exact name of the item."}

REGISTRY = [
    {
        "id": "fl_shop",
        "functions": [
            {"name": "sell", "kind": "action",
             "description": "Sell an item from the shop's stock to the player.",
             "parameters": {"type": "object",
                            "properties": {"item_name": ITEM_PARAM,
                                           "quantity": {"type": "integer",
                                                        "description": "How many to sell."}},
                            "required": ["item_name"]}},
            {"name": "get_item_info", "kind": "tool",
             "description": "Look up an item's type and description.",
             "parameters": {"type": "object", "properties": {"item_name": ITEM_PARAM},
                            "required": ["item_name"]}},
        ],
    },
    {
        "id": "fl_gate",
        "functions": [
            {"name": "open_gate", "kind": "action",
             "description": "Raise the portcullis of a city gate.",
             "parameters": {"type": "object",
                            "properties": {"gate": {"type": "string",
                                                    "description": "Which gate.",
                                                    "enum": ["north", "east"]}},
                            "required": ["gate"]}},
            {"name": "get_item_info", "kind": "tool",
             "description": "Look up an item's type and description.",
             "parameters": {"type": "object", "properties": {"item_name": ITEM_PARAM},
                            "required": ["item_name"]}},
        ],
    },
    {
        "id": "fl_lore",
        "functions": [
            {"name": "get_item_info", "kind": "tool",
             "description": "Look up an item's type and description.",
             "parameters": {"type": "object", "properties": {"item_name": ITEM_PARAM},
                            "required": ["item_name"]}},
        ],
    },
]

# Queries whose scripted tool-call output differs from gold, so scores are not all 1.0.
MOCK_OVERRIDES = {
    "I'll take two Waterskin then.": [("sell", {"item_name": "Waterskin", "quantity": 1})],
    "I'll buy that and some Willow Bark.": [("sell", {"item_name": "Mint Oil", "quantity": 1})],
    "Open the gate, please.": [("open_gate", {"gate": "north"})],
}


def execute(name, params, items):
    if name == "get_item_info":
        for n, t, d in items:
            if n.lower() == params["item_name"].lower():
                return "ok", {"name": n, "item_type": t, "description": d}
        return "not_found", None
    return "ok", dict({"action": name}, **params)


def render_call(name, params):
    body = json.dumps({"name": name, "parameters": params}, ensure_ascii=False)
    return "<tool_call>\n" + body + "\n</tool_call>"


def build():
    dataset, rules = [], []
    for c in CONVERSATIONS:
        turns = []
        for query, reply, calls in c["turns"]:
            turns.append({"speaker": "player", "text": query})
            npc = {"speaker": "npc", "text": reply}
            if calls:
                npc["tool_calls"] = [{"name": n, "parameters": p} for n, p in calls]
                results = []
                for n, p in calls:
                    status, payload = execute(n, p, c["items"])
                    results.append({"call": {"name": n, "parameters": p},
                                    "status": status, "payload": payload})
                npc["tool_results"] = results
            turns.append(npc)
            scripted = MOCK_OVERRIDES.get(query, calls)
            if scripted:
                rules.append({"adapter": "tool_call", "ends_with": "user query:\n" + query,
                              "output": "\n".join(render_call(n, p) for n, p in scripted)})
        dataset.append({
            "id": c["id"],
            "function_list_id": c["function_list_id"],
            "background": {
                "worldview": c["worldview"],
                "persona": c["persona"],
                "role": c["role"],
                "knowledge": {
                    "general_info": [{"title": t, "text": x} for t, x in c["general"]],
                    "knowledge_info": [{"name": n, "item_type": t, "description": d}
                                       for n, t, d in c["items"]],
                },
                "state": c["state"],
            },
            "turns": turns,
        })
    script = {
        "rules": rules,
        "defaults": {
            "tool_call": "",
            "dialogue_with_results": "Let me see. ${query} I can help with that.",
            "dialogue_without_results": "Hmm. ${query} Ask me anything else.",
        },
        "fallback": "",
    }
    profile = {
        "endpoint_url": "mock://",
        "adapters": {"tool_call": "npc-tool-call",
                     "dialogue_with_results": "npc-dialogue-with-results",
                     "dialogue_without_results": "npc-dialogue-without-results"},
        "request_timeout_ms": 7000,
        "mock_script": "mock_script.json",
    }
    return dataset, script, profile


def check_leaks(dataset):
    """Persona values must not occur in the tool-call scaffold, item names not in the
    worldview/persona/state/role text, so exclusion checks are meaningful."""
    fc_template = (ROOT / "assets/templates/function_call.system.txt").read_text()
    tools_text = json.dumps(REGISTRY, ensure_ascii=False)
    for conv in dataset:
        bg = conv["background"]
        scaffold = "\n".join([fc_template, tools_text, json.dumps(bg["knowledge"]),
                              json.dumps(bg["state"])])
        for key, value in bg["persona"].items():
            assert value not in scaffold, (conv["id"], key, value)
        free_text = "\n".join([bg["worldview"], bg["role"], json.dumps(bg["persona"]),
                               json.dumps(bg["state"])])
        for item in bg["knowledge"]["knowledge_info"]:
            assert item["name"] not in free_text, (conv["id"], item["name"])


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=pathlib.Path, default=ROOT / "data")
    args = ap.parse_args()
    dataset, script, profile = build()
    check_leaks(dataset)
    args.out.mkdir(parents=True, exist_ok=True)
    for name, obj in [("dataset.json", dataset), ("registry.json", REGISTRY),
                      ("mock_script.json", script), ("profile.mock.json", profile)]:
        (args.out / name).write_text(json.dumps(obj, indent=2, ensure_ascii=False) + "\n")


if __name__ == "__main__":
    main()
