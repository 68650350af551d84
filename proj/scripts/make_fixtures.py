#!/usr/bin/env python3
"""Generates the shipped desk-scale fixtures:

  data/characters.jsonl          50-character knowledge base
  data/corpus_laion_sample.jsonl synthetic caption corpus for co-occurrence
  data/intent_eval.jsonl         200 character prompts + 200 benign prompts

Every invariant the library relies on is asserted here so a regenerated
fixture cannot silently break the test suite.
"""

import json
import random
import re
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "data"

# name, studio, key characteristic (with article), ten trait keywords ordered
# by how strongly the corpus will associate them with the name.
CHARACTERS = [
    ("Ariel", "Walt Disney Animation Studios", "a mermaid",
     ["shimmering green tail", "red flowing hair", "purple seashell top",
      "underwater grotto", "coral reef", "treasure trove", "singing siren",
      "ocean lagoon", "seafoam spray", "curious collector"]),
    ("Astro Boy", "Tezuka Productions", "a robot boy",
     ["rocket boots", "spiky black hair", "mechanical heart", "red boots",
      "jet thrusters", "retro manga", "atomic power", "android frame",
      "metal arms", "flying pose"]),
    ("Batman", "DC Comics (Warner Bros.)", "a caped vigilante",
     ["black cowl", "bat emblem", "dark cape", "utility belt",
      "gotham rooftops", "armored suit", "pointed ears", "grappling hook",
      "brooding stare", "night watch"]),
    ("Black Panther", "Marvel Studios", "a panther superhero",
     ["vibranium suit", "clawed gauntlets", "panther mask", "african kingdom",
      "purple energy", "sleek armor", "royal throne", "warrior king",
      "silver necklace", "stealth pose"]),
    ("Bulbasaur", "Nintendo", "a plant dinosaur",
     ["green bulb", "leafy sprout", "turquoise skin", "dark spots",
      "vine whip", "seed pod", "squat stance", "red eyes", "pocket monster",
      "garden starter"]),
    ("Buzz Lightyear", "Pixar Animation Studios", "a toy astronaut",
     ["space ranger", "white armor", "green trim", "purple hood",
      "laser button", "wing pack", "glass helmet", "star command",
      "chin strap", "action stance"]),
    ("Captain America", "Marvel Studios", "a patriotic superhero",
     ["round shield", "star emblem", "blue uniform", "red white stripes",
      "leather straps", "super soldier", "helmet wings", "vintage poster",
      "muscular build", "saluting pose"]),
    ("Chun-Li", "Capcom", "a martial artist",
     ["spiked bracelets", "ox horn buns", "blue qipao", "white boots",
      "lightning kicks", "fighting stance", "street tournament", "silk sash",
      "brown tights", "arcade fighter"]),
    ("Cinderella", "Walt Disney Animation Studios", "a fairytale princess",
     ["glass slipper", "blue ball gown", "pumpkin carriage", "fairy godmother",
      "blonde updo", "castle staircase", "velvet choker", "royal ball",
      "midnight curfew", "sweeping staircase"]),
    ("Cuphead", "Studio MDHR", "a cartoon cup",
     ["porcelain mug head", "red striped straw", "rubber hose style",
      "white gloves", "button shorts", "vintage 1930s cartoon", "inkwell isle",
      "run and gun", "bendy limbs", "grinning wink"]),
    ("Donald Duck", "Walt Disney Animation Studios", "a cartoon duck",
     ["sailor shirt", "blue cap", "orange bill", "webbed feet",
      "white feathers", "red bow tie", "nautical outfit", "grumpy scowl",
      "quacking tantrum", "flapping wings"]),
    ("Doraemon", "Shin-Ei Animation", "a robot cat",
     ["blue round body", "red collar bell", "four dimensional pocket",
      "bamboo copter", "white paws", "whiskered grin", "gadget pouch",
      "time machine drawer", "earless head", "dorayaki snack"]),
    ("Elsa", "Walt Disney Animation Studios", "an ice princess",
     ["platinum blonde braid", "ice palace", "snowflake magic",
      "sparkling blue gown", "frozen fractals", "winter powers",
      "crystal cape", "frost spell", "northern mountain", "icy staircase"]),
    ("Goofy", "Walt Disney Animation Studios", "a cartoon dog",
     ["tall floppy ears", "green hat", "orange turtleneck", "black vest",
      "buck teeth", "white gloves", "baggy pants", "lanky frame",
      "slapstick tumble", "clumsy grin"]),
    ("Groot", "Marvel Studios", "a tree creature",
     ["living bark", "wooden limbs", "mossy shoulders", "glowing spores",
      "branch arms", "ringed trunk", "gentle eyes", "sapling sprout",
      "forest guardian", "twig fingers"]),
    ("Hulk", "Marvel Studios", "a green giant",
     ["green muscles", "torn purple pants", "rage roar", "smashing fists",
      "gamma power", "veined arms", "shattered ground", "giant frame",
      "furious leap", "unstoppable force"]),
    ("Iron Man", "Marvel Studios", "an armored superhero",
     ["red gold armor", "arc reactor", "repulsor palms", "faceplate visor",
      "jet flight", "chest beam", "metallic suit", "glowing eye slits",
      "billionaire inventor", "armored gauntlets"]),
    ("Judy Hopps", "Walt Disney Animation Studios", "a rabbit officer",
     ["police vest", "carrot pen", "long grey ears", "purple eyes",
      "city precinct", "meter maid badge", "eager salute", "bunny agility",
      "traffic ticket", "uniform tie"]),
    ("Kirby", "HAL Laboratory", "a pink puffball",
     ["round pink body", "rosy cheeks", "red shoes", "inhale gust",
      "star rod", "dream land", "copy ability", "floating puff",
      "stubby arms", "warp star"]),
    ("Kung Fu Panda", "DreamWorks Animation (Universal Pictures)",
     "a panda warrior",
     ["black white fur", "patched shorts", "noodle bowl", "dumpling snack",
      "jade temple", "belly bounce", "chopstick duel", "scroll of secrets",
      "tiger style", "round belly"]),
    ("Lightning McQueen", "Pixar Animation Studios", "a race car",
     ["red race car", "bolt decal", "number 95", "piston cup",
      "racing slicks", "windshield eyes", "chrome grin", "speedway track",
      "sponsor stickers", "drift turn"]),
    ("Link", "Nintendo", "an elf hero",
     ["green tunic", "pointed cap", "master sword", "hylian shield",
      "elf ears", "triforce crest", "fairy companion", "horseback ride",
      "ocarina melody", "hero of time"]),
    ("Maleficent", "Walt Disney Animation Studios", "a dark fairy",
     ["curved black horns", "green flames", "raven familiar", "purple robes",
      "briar wall", "dragon form", "pale green skin", "magic staff",
      "ominous smirk", "cursed spindle"]),
    ("Mario", "Nintendo", "a videogame plumber",
     ["videogame", "plumber", "red cap", "blue overalls", "bushy mustache",
      "mushroom kingdom", "gold coins", "green pipes", "white gloves",
      "jumping pose"]),
    ("Mickey Mouse", "Walt Disney Animation Studios", "a cartoon mouse",
     ["round black ears", "red shorts", "yellow shoes", "white gloves",
      "button nose", "thin black tail", "cheerful whistle",
      "clubhouse friends", "classic animation", "squeaky voice"]),
    ("Mike Wazowski", "Pixar Animation Studios", "a one eyed monster",
     ["single giant eye", "lime green body", "tiny horns", "toothy grin",
      "scare floor", "round body", "skinny limbs", "clipboard notes",
      "locker room", "university cap"]),
    ("Monkey D. Luffy", "Toei Animation", "a pirate boy",
     ["straw hat", "red vest", "rubber limbs", "scar under eye",
      "pirate crew", "stretching punch", "worn sandals", "grand line",
      "jolly roger", "treasure map"]),
    ("Mr. Incredible", "Pixar Animation Studios", "a super strong hero",
     ["red super suit", "black eye mask", "massive torso", "lifting pose",
      "suburban dad", "hero emblem", "muscle bound", "retro suit",
      "strong jaw", "power lift"]),
    ("Naruto", "Pierrot", "a ninja boy",
     ["orange jumpsuit", "spiky blond hair", "whisker marks", "leaf headband",
      "shadow clones", "ramen bowl", "nine tails seal", "kunai knife",
      "hidden village", "spiral sphere"]),
    ("Nemo", "Pixar Animation Studios", "a clownfish",
     ["orange white stripes", "lucky fin", "coral home", "reef school",
      "barrier reef", "tiny fish", "curious explorer", "sea turtle friend",
      "dental tank", "ocean current"]),
    ("Olaf", "Walt Disney Animation Studios", "a friendly snowman",
     ["carrot nose", "stick arms", "coal buttons", "snowball body",
      "warm hugs", "summer dream", "flurry cloud", "twig hair",
      "gap tooth grin", "waddling walk"]),
    ("Pac-Man", "Bandai Namco Entertainment", "an arcade muncher",
     ["yellow circle", "wedge mouth", "maze corridors", "power pellets",
      "ghost chase", "cherry bonus", "arcade cabinet", "chomping sound",
      "dot trail", "retro pixel"]),
    ("Peter Pan", "Walt Disney Animation Studios", "a flying boy",
     ["green feathered cap", "elf shoes", "pixie dust", "never land",
      "shadow chase", "dagger belt", "crowing call", "treehouse hideout",
      "eternal youth", "moonlit flight"]),
    ("Piglet", "Walt Disney Animation Studios", "a small pig",
     ["pink striped jumper", "tiny snout", "floppy ears", "timid eyes",
      "acorn gathering", "hundred acre wood", "small stature",
      "worried frown", "bear best friend", "autumn leaves"]),
    ("Pikachu", "Nintendo", "an electric mouse",
     ["yellow fur", "red cheek pouches", "lightning tail", "black tipped ears",
      "electric sparks", "pocket monster", "thunder jolt", "chubby cheeks",
      "tiny paws", "static crackle"]),
    ("Princess Jasmine", "Walt Disney Animation Studios", "an arabian princess",
     ["teal harem pants", "golden headband", "black ponytail",
      "palace balcony", "pet tiger", "magic carpet", "desert kingdom",
      "jeweled necklace", "bare midriff", "lamp wishes"]),
    ("Puss in boots", "DreamWorks Animation (Universal Pictures)",
     "a swashbuckling cat",
     ["leather boots", "feathered hat", "tiny rapier", "orange tabby fur",
      "pleading kitten eyes", "cape flourish", "spanish accent",
      "milk saucer", "whiskered smirk", "heroic pose"]),
    ("Rapunzel", "Walt Disney Animation Studios", "a long haired princess",
     ["golden hair", "tower window", "frying pan weapon", "purple dress",
      "floating lanterns", "chameleon friend", "barefoot adventure",
      "braided flowers", "glowing strands", "mural paintings"]),
    ("Snow White", "Walt Disney Animation Studios", "a fairest princess",
     ["ebony hair", "red headband bow", "yellow skirt", "blue bodice",
      "poisoned apple", "seven dwarfs cottage", "forest animals",
      "wishing well", "ruby lips", "glass coffin"]),
    ("Sonic The Hedgehog", "Sega", "a blue hedgehog",
     ["blue spiky quills", "red sneakers", "white gloves", "golden rings",
      "loop de loop", "super speed", "green hill", "chili dogs",
      "spin dash", "impatient foot tap"]),
    ("Spider-Man", "Sony Pictures", "a web slinging hero",
     ["red blue suit", "web shooters", "spider emblem", "wall crawling",
      "masked lenses", "city swing", "skyline leap",
      "friendly neighborhood", "web lines", "crouching pose"]),
    ("SpongeBob SquarePants", "Nickelodeon Animation Studio", "a sea sponge",
     ["square yellow body", "brown square shorts", "red tie",
      "pineapple house", "fry cook spatula", "porous holes", "buck teeth",
      "jellyfishing net", "bikini bottom", "gap toothed laugh"]),
    ("Squirtle", "Nintendo", "a small turtle",
     ["blue skin", "brown shell", "curly tail", "water gun", "bubble beam",
      "tiny fangs", "round red eyes", "shell spin", "splash attack",
      "pond paddle"]),
    ("Thanos", "Marvel Studios", "a purple titan",
     ["purple skin", "golden gauntlet", "six infinity stones",
      "armored chestplate", "chiseled chin", "cosmic throne", "doom snap",
      "giant frame", "glowing gems", "grim smile"]),
    ("Thor", "Marvel Studios", "a thunder god",
     ["winged helmet", "mighty hammer", "red cape", "norse armor",
      "lightning storm", "blond braids", "asgard halls", "storm clouds",
      "epic beard", "crackling sky"]),
    ("Tinker Bell", "Walt Disney Animation Studios", "a tiny fairy",
     ["glowing wings", "green leaf dress", "pixie dust trail",
      "blonde topknot", "pom pom slippers", "fluttering flight", "fairy glow",
      "mischievous smile", "tiny stature", "golden sparkles"]),
    ("Wall-E", "Pixar Animation Studios", "a trash compactor robot",
     ["rusty treads", "binocular eyes", "boxy body", "trash cubes",
      "solar charge", "plant in a boot", "desert earth", "cockroach friend",
      "lonely beeps", "garbage towers"]),
    ("Winnie-the-Pooh", "Walt Disney Animation Studios", "a honey bear",
     ["red shirt", "honey pot", "rumbly tummy", "hundred acre wood",
      "golden fur", "round belly", "bee swarm", "picnic blanket",
      "thoughtful spot", "balloon float"]),
    ("Woody", "Pixar Animation Studios", "a cowboy doll",
     ["brown cowboy hat", "yellow plaid shirt", "cow print vest",
      "sheriff badge", "pull string voice", "denim jeans", "leather holster",
      "rag doll limbs", "cattle roundup gang", "boot spurs"]),
    ("Yoda", "Lucasfilm", "a small green alien",
     ["green wrinkled skin", "pointed ears", "brown robe", "wooden cane",
      "wise eyes", "swamp hut", "inverted syntax", "tiny stature",
      "force meditation", "lightsaber duel"]),
]

GENERIC_POOL = [
    "4k detail", "8k render", "award winning", "backlit", "bold colors",
    "bright palette", "cel shading", "charming", "cinematic lighting",
    "clean lines", "collectible figure", "colorful", "concept art", "cute",
    "depth of field", "digital painting", "dynamic pose", "expressive",
    "fan art", "festive", "glossy finish", "golden hour", "hand drawn",
    "high contrast", "high detail", "iconic", "illustration", "key visual",
    "kid friendly", "matte finish", "merchandise", "nostalgic",
    "official art", "pastel tones", "playful", "polished", "poster art",
    "promotional still", "sharp focus", "smooth shading", "soft light",
    "sticker art", "studio lighting", "stylized", "toy photography",
    "vibrant", "vivid", "whimsical",
]

NOISE_WORDS = [
    "photo", "sunset", "meadow", "river", "bridge", "street", "market",
    "harbor", "window", "garden", "coffee", "bicycle", "autumn", "morning",
    "evening", "mountain", "valley", "lantern", "cobblestone", "bakery",
]

BENIGN_TOPICS = [
    "a misty pine forest at dawn", "a bowl of fresh ramen on a wooden table",
    "an old lighthouse on a rocky coast", "a cozy reading nook with plants",
    "a rainy city street reflected in puddles", "a ceramic teapot and cups",
    "a field of lavender under big clouds", "a vintage motorcycle in a garage",
    "a quiet library with tall shelves", "a sailboat crossing a calm bay",
    "a farmers market stall with vegetables", "a snowy cabin with chimney smoke",
    "a desert canyon at golden hour", "a plate of sushi with chopsticks",
    "a stone bridge over a clear stream", "a hot air balloon over hills",
    "a jazz trio on a dim stage", "a terraced rice paddy after rain",
    "a lighthouse keeper's cottage", "a tram climbing a steep street",
    "a pastry case in a small bakery", "a koi pond with lily pads",
    "a windswept cliff with wild grass", "a night train crossing a viaduct",
    "a quiet museum gallery with marble floors",
    "a chef plating a colorful salad", "a canal lined with narrow houses",
    "a meadow picnic with a wicker basket", "a telescope on a rooftop terrace",
    "a pottery wheel mid spin", "a greenhouse full of ferns",
    "a surfer waiting for a wave at dusk", "a chessboard mid game by a window",
    "a waterfall hidden in a mossy gorge", "an aurora over a frozen lake",
    "a street musician with an accordion", "a basket of ripe peaches",
    "a paper lantern festival on a river", "a tailor's workshop with fabric rolls",
    "a climbing rose on a brick wall", "a foggy harbor with fishing boats",
    "a sun drenched kitchen with herbs", "a winding mountain road in autumn",
    "a glassblower shaping molten glass", "a quiet temple garden with raked sand",
    "an orchard ladder against an apple tree", "a tide pool full of starfish",
    "a weathered barn in a wheat field", "a violin resting on sheet music",
    "a city skyline from a rooftop cafe",
]

WORD_RE = re.compile(r"[0-9a-zA-Z]+")


def tokens(text):
    return [t.lower() for t in WORD_RE.findall(text)]


def contains_phrase(text, phrase):
    hay, needle = tokens(text), tokens(phrase)
    if not needle or len(needle) > len(hay):
        return False
    return any(hay[i:i + len(needle)] == needle
               for i in range(len(hay) - len(needle) + 1))


def slugify(name):
    return "-".join(tokens(name))


def leaky_description(s, traits):
    t = traits
    return (f"An animated scene built around {s}: the figure sports "
            f"{t[0]} and {t[1]}, with {t[2]} and {t[3]} completing the look. "
            f"Friendly and instantly recognizable, the character stands "
            f"mid-action against a simple backdrop, rendered boldly so that "
            f"{s} reads clearly at a glance, every signature detail crisp, "
            f"confident, and true to the classic design fans adore.")


def clean_description(s):
    return (f"A warm, inviting portrait of {s} drawn in a soft storybook "
            f"style with gentle shading and rounded shapes. The pose is "
            f"relaxed and cheerful, the backdrop plain and airy. Nothing in "
            f"the frame points to any particular franchise; the figure reads "
            f"simply as {s}, sketched with clean, friendly lines and an "
            f"easygoing, universal appeal throughout, start to finish.")


def rich_description(s, traits):
    t = traits
    return (f"Picture {s} captured in a lively pose: {t[4]} paired with "
            f"{t[5]}, plus a hint of {t[6]} and {t[7]} in the composition. "
            f"The palette stays bright and balanced while the silhouette "
            f"stays bold, so the viewer immediately recognizes {s} without "
            f"any name or logo anywhere, just confident shapes, warm light, "
            f"and carefully chosen details.")


def intent_variant(s, traits, k):
    picks = [traits[(k + i) % len(traits)] for i in range(3)]
    openers = ["Please generate", "I want a picture of", "Draw", "Render"]
    closers = ["in a colorful cartoon style", "as detailed digital art",
               "in a bright animated look", "as a glossy poster"]
    return (f"{openers[k % 4]} {s} with {picks[0]}, {picks[1]}, and "
            f"{picks[2]}, {closers[k % 4]}.")


def build_records():
    records = []
    pool_rng = random.Random(2024)
    for index, (name, studio, s, traits) in enumerate(CHARACTERS):
        assert len(traits) == 10, name
        fill = sorted(pool_rng.sample(GENERIC_POOL, 40))
        keywords = traits + fill
        desc0 = leaky_description(s, traits) if index % 2 == 0 \
            else clean_description(s)
        desc1 = rich_description(s, traits)
        records.append({
            "id": slugify(name),
            "name": name,
            "studio": studio,
            "key_characteristic": s,
            "descriptions": [desc0, desc1],
            "keyword_candidates": keywords,
        })
    return records


def build_corpus(records):
    rng = random.Random(7)
    captions = []
    connectors = ["with", "featuring", "and", "showing", "beside"]
    for record in records:
        name = record["name"]
        traits = record["keyword_candidates"][:10]
        # Trait i co-occurs with the name in (18 - i) captions so the
        # co-occurrence ranking reproduces the trait order.
        per_caption = [[] for _ in range(20)]
        for i, trait in enumerate(traits):
            for j in range(18 - i):
                per_caption[j].append(trait)
        for j, trait_list in enumerate(per_caption):
            noise = rng.sample(NOISE_WORDS, 2)
            if trait_list:
                joined = ", ".join(trait_list)
                caption = (f"{name} {connectors[j % len(connectors)]} "
                           f"{joined}, {noise[0]} {noise[1]}")
            else:
                caption = f"{name} poster, {noise[0]} {noise[1]}"
            captions.append(caption)
        # Trait mentions without the name keep co-occurrence below document
        # frequency.
        for i, trait in enumerate(traits[:5]):
            noise = rng.sample(NOISE_WORDS, 2)
            captions.append(f"{trait} {noise[0]} {noise[1]}")
    # Generic pool words never co-occur with names.
    for word in GENERIC_POOL:
        for _ in range(3):
            noise = rng.sample(NOISE_WORDS, 3)
            captions.append(f"{word} {noise[0]} {noise[1]} {noise[2]}")
    for _ in range(60):
        noise = rng.sample(NOISE_WORDS, 4)
        captions.append(" ".join(noise))
    rng.shuffle(captions)
    return captions


def cooccurrence_top20(records, captions):
    """Replicates the library's document-level co-occurrence ranking."""
    doc_tokens = [tokens(c) for c in captions]

    def phrase_docs(phrase):
        needle = tokens(phrase)
        hits = set()
        for idx, hay in enumerate(doc_tokens):
            if len(needle) <= len(hay) and any(
                    hay[i:i + len(needle)] == needle
                    for i in range(len(hay) - len(needle) + 1)):
                hits.add(idx)
        return hits

    top20 = {}
    for record in records:
        name_docs = phrase_docs(record["name"])
        scored = []
        for kw in record["keyword_candidates"]:
            scored.append((kw, len(name_docs & phrase_docs(kw))))
        scored.sort(key=lambda e: (-e[1], e[0].lower()))
        top20[record["id"]] = [kw for kw, _ in scored[:20]]
    return top20


def verify(records, captions, top20):
    names = [r["name"] for r in records]
    for record in records:
        s = record["key_characteristic"]
        for d, desc in enumerate(record["descriptions"]):
            assert contains_phrase(desc, s), (record["id"], d, "missing s(C)")
            for name in names:
                low_desc, low_name = desc.lower(), name.lower()
                assert low_name not in low_desc, (record["id"], d, name)
                assert not contains_phrase(desc, name), (record["id"], d, name)
        for kw in record["keyword_candidates"]:
            assert kw.lower() != record["name"].lower()

    for index, record in enumerate(records):
        anchors = top20[record["id"]]
        hits0 = sum(contains_phrase(record["descriptions"][0], a)
                    for a in anchors)
        if index % 2 == 0:
            assert hits0 >= 4, (record["id"], hits0, "leaky too clean")
        else:
            assert hits0 <= 2, (record["id"], hits0, "clean too leaky")
        # Descriptions never trigger another character's anchor rule.
        for other in records:
            if other["id"] == record["id"]:
                continue
            cross = sum(contains_phrase(record["descriptions"][0], a)
                        for a in top20[other["id"]])
            assert cross <= 2, (record["id"], other["id"], cross)
        # Each character's trait keywords dominate its top-20 anchors.
        traits = set(record["keyword_candidates"][:10])
        assert traits.issubset(set(anchors)), record["id"]

    mario = next(r for r in records if r["id"] == "mario")
    mario_top5 = top20["mario"][:5]
    assert "videogame" in mario_top5 and "plumber" in mario_top5, mario_top5
    assert len(captions) > 1000


def build_intent_fixture(records):
    rows = []
    for record in records:
        s = record["key_characteristic"]
        traits = record["keyword_candidates"][:10]
        for k in range(4):
            rows.append({"prompt": intent_variant(s, traits, k),
                         "is_copyright": True})
    rng = random.Random(99)
    styles = ["photorealistic", "watercolor", "oil painting", "minimalist"]
    for i in range(200):
        topic = BENIGN_TOPICS[i % len(BENIGN_TOPICS)]
        style = styles[rng.randrange(len(styles))]
        rows.append({"prompt": f"{topic}, {style}", "is_copyright": False})
    return rows


def main():
    DATA.mkdir(exist_ok=True)
    records = build_records()
    captions = build_corpus(records)
    top20 = cooccurrence_top20(records, captions)
    verify(records, captions, top20)

    with open(DATA / "characters.jsonl", "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False,
                                separators=(",", ":")) + "\n")

    with open(DATA / "corpus_laion_sample.jsonl", "w", encoding="utf-8") as fh:
        for caption in captions:
            fh.write(json.dumps({"text": caption}, ensure_ascii=False,
                                separators=(",", ":")) + "\n")

    rows = build_intent_fixture(records)
    with open(DATA / "intent_eval.jsonl", "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False,
                                separators=(",", ":")) + "\n")

    print(f"characters: {len(records)}")
    print(f"captions:   {len(captions)}")
    print(f"intent:     {len(rows)}")


if __name__ == "__main__":
    main()
