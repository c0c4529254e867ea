#!/usr/bin/env python3
# Copyright 2026 The Hybrid DST Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes the bundled fixture ontology, lexicon and retrieval rows.

Usage: make_fixture_data.py <data-dir>

The output is deterministic. Run it after editing the tables below and
commit the regenerated files.
"""

import json
import random
import re
import sys
from pathlib import Path

# slot id -> (English name, Persian name, values or None for free text,
#             gazetteer for free-text slots)
SLOTS = {
    "city": ("city", "شهر",
             ["Tehran", "Shiraz", "Isfahan", "Tabriz", "Mashhad", "قم", "Yazd", "Kerman"], None),
    "date": ("date", "تاریخ", ["today", "tomorrow", "this weekend", "next monday"], None),
    "cuisine": ("cuisine", "نوع غذا",
                ["kebab", "pizza", "sushi", "vegetarian", "seafood", "burgers"], None),
    "price": ("price range", "محدوده قیمت", ["cheap", "moderate", "expensive"], None),
    "restaurant_name": ("restaurant name", "نام رستوران", None,
                        ["Shandiz", "Nayeb", "Divan", "Haft Khan"]),
    "party_size": ("party size", "تعداد نفرات",
                   ["two people", "three people", "four people", "six people"], None),
    "time": ("time", "ساعت", ["morning", "noon", "evening", "midnight"], None),
    "stars": ("hotel stars", "ستاره هتل", ["three stars", "four stars", "five stars"], None),
    "hotel_name": ("hotel name", "نام هتل", None, ["Espinas", "Homa", "Abbasi", "Laleh"]),
    "nights": ("number of nights", "تعداد شب",
               ["one night", "two nights", "three nights", "a week"], None),
    "destination": ("destination", "مقصد",
                    ["the airport", "central station", "the university", "grand bazaar",
                     "milad tower"], None),
    "train_number": ("train number", "شماره قطار", None, ["T101", "T202", "T303"]),
    "flight_number": ("flight number", "شماره پرواز", None, ["IR712", "W5115", "EP840"]),
    "cabin": ("cabin class", "کلاس پرواز", ["economy", "business class", "first class"], None),
    "movie_genre": ("movie genre", "ژانر فیلم",
                    ["comedy", "drama", "thriller", "animation", "documentary"], None),
    "movie_title": ("movie title", "نام فیلم", None,
                    ["A Separation", "The Salesman", "Children of Heaven"]),
    "music_genre": ("music genre", "سبک موسیقی",
                    ["jazz", "classical", "rock", "traditional", "hip hop"], None),
    "artist": ("artist", "هنرمند", ["Shajarian", "Googoosh", "Kayhan Kalhor", "Mohsen Namjoo"],
               None),
    "volume_level": ("volume level", "میزان صدا", ["louder", "quieter", "mute"], None),
    "news_topic": ("news topic", "موضوع خبر",
                   ["politics", "finance", "technology", "science", "culture"], None),
    "news_source": ("news source", "منبع خبر", ["BBC", "Reuters", "IRNA", "Al Jazeera"], None),
    "book_genre": ("book genre", "ژانر کتاب",
                   ["poetry", "history", "fantasy", "biography", "mystery"], None),
    "author": ("author", "نویسنده", ["Hafez", "Rumi", "Sadegh Hedayat", "Simin Daneshvar"], None),
    "book_title": ("book title", "نام کتاب", None,
                   ["The Blind Owl", "Savushun", "Shahnameh", "Masnavi"]),
    "product": ("product", "کالا", ["laptop", "phone", "headphones", "sneakers", "carpet"], None),
    "order_id": ("order id", "شماره سفارش", None, ["A1001", "A1002", "B2001"]),
    "account_type": ("account type", "نوع حساب", ["checking", "savings", "credit card"], None),
    "amount": ("amount", "مبلغ", None, ["100 dollars", "500 dollars", "2000 dollars"]),
    "recipient": ("recipient", "گیرنده", None, ["Sara", "Reza", "Maryam", "Ali"]),
    "specialty": ("specialty", "تخصص",
                  ["dentist", "cardiologist", "pediatrician", "dermatologist"], None),
    "sports_team": ("team", "تیم",
                    ["Persepolis", "Esteghlal", "Sepahan", "Team Melli"], None),
    "event_title": ("event title", "عنوان رویداد", None,
                    ["project review", "yoga class", "family lunch"]),
    "reminder_topic": ("reminder topic", "موضوع یادآوری",
                       ["pay rent", "call mom", "water plants", "take medicine"], None),
    "dish": ("dish", "غذا",
             ["ghormeh sabzi", "fesenjan", "tahdig", "ash reshteh", "kashk bademjan"], None),
    "diet": ("diet", "رژیم", ["vegan", "gluten free", "low carb"], None),
    "target_language": ("target language", "زبان مقصد",
                        ["English", "Persian", "Arabic", "French", "German"], None),
    "phrase_text": ("text", "متن", None, ["good night", "thank you", "where is the bus"]),
    "currency": ("currency", "ارز", ["dollar", "euro", "pound", "yuan"], None),
    "target_currency": ("target currency", "ارز مقصد", ["rial", "toman", "lira", "dirham"], None),
    "road": ("road", "جاده", ["Hemmat highway", "Modares highway", "Navab expressway",
                              "Chamran highway"], None),
}

# domain -> [(intent id, [(slot id, mandatory)], [trigger phrases])]
DOMAINS = {
    "weather": [
        ("get_weather", [("city", True), ("date", False)], ["weather", "هوا"]),
        ("get_forecast_week", [("city", True)], ["weekly forecast"]),
        ("air_quality", [("city", True)], ["air quality", "pollution"]),
    ],
    "restaurant": [
        ("find_restaurant", [("city", True), ("cuisine", True), ("price", False)],
         ["restaurant", "place for dinner", "رستوران"]),
        ("book_table", [("restaurant_name", True), ("party_size", True), ("time", False)],
         ["reserve a table"]),
    ],
    "hotel": [
        ("find_hotel", [("city", True), ("stars", False), ("price", False)],
         ["hotel", "somewhere to stay"]),
        ("book_hotel", [("hotel_name", True), ("nights", True), ("date", False)],
         ["book a room"]),
    ],
    "taxi": [
        ("book_taxi", [("destination", True), ("time", False)], ["taxi", "cab"]),
        ("taxi_fare", [("destination", True)], ["fare estimate"]),
    ],
    "train": [
        ("find_train", [("city", True), ("destination", True), ("date", False)],
         ["train ticket"]),
        ("train_status", [("train_number", True)], ["train delay"]),
    ],
    "flight": [
        ("find_flight", [("city", True), ("destination", True), ("date", False),
                         ("cabin", False)], ["flight ticket", "fly"]),
        ("flight_status", [("flight_number", True)], ["gate info"]),
    ],
    "movie": [
        ("find_movie", [("movie_genre", True), ("city", False)], ["cinema listings", "movie"]),
        ("book_movie_ticket", [("movie_title", True), ("time", True), ("party_size", False)],
         ["seats for"]),
    ],
    "music": [
        ("play_music", [("music_genre", True), ("artist", False)], ["play some", "song"]),
        ("music_volume", [("volume_level", True)], ["volume"]),
    ],
    "news": [
        ("get_news", [("news_topic", True)], ["latest news", "اخبار"]),
        ("news_headlines", [("news_source", True)], ["headlines"]),
    ],
    "books": [
        ("find_book", [("book_genre", True), ("author", False)], ["recommend a book", "novel"]),
        ("book_summary", [("book_title", True)], ["summarize"]),
    ],
    "shopping": [
        ("find_product", [("product", True), ("price", False)], ["buy", "shop"]),
        ("track_order", [("order_id", True)], ["track", "package"]),
    ],
    "bank": [
        ("check_balance", [("account_type", True)], ["balance"]),
        ("transfer_money", [("amount", True), ("account_type", True), ("recipient", True)],
         ["transfer", "send money"]),
    ],
    "health": [
        ("find_doctor", [("specialty", True), ("city", False)], ["doctor", "physician"]),
        ("book_appointment", [("specialty", True), ("date", True), ("time", False)],
         ["appointment"]),
    ],
    "sports": [
        ("sports_scores", [("sports_team", True)], ["score", "match result"]),
        ("sports_schedule", [("sports_team", True), ("date", False)], ["fixtures", "next game"]),
    ],
    "calendar": [
        ("create_event", [("event_title", True), ("date", True), ("time", False)],
         ["add to calendar", "schedule"]),
        ("list_events", [("date", True)], ["agenda"]),
    ],
    "reminder": [
        ("set_reminder", [("reminder_topic", True), ("time", True)], ["remind me"]),
        ("cancel_reminder", [("reminder_topic", True)], ["cancel reminder"]),
    ],
    "recipe": [
        ("find_recipe", [("dish", True), ("diet", False)], ["recipe", "how to cook"]),
        ("cooking_time", [("dish", True)], ["how long to make"]),
    ],
    "translation": [
        ("translate_text", [("target_language", True), ("phrase_text", True)],
         ["translate", "ترجمه"]),
        ("detect_language", [("phrase_text", True)], ["which language"]),
    ],
    "currency": [
        ("exchange_rate", [("currency", True), ("target_currency", True)], ["exchange rate"]),
        ("convert_currency", [("amount", True), ("currency", True), ("target_currency", True)],
         ["convert"]),
    ],
    "traffic": [
        ("traffic_status", [("city", True), ("road", True)], ["traffic"]),
        ("commute_time", [("city", True), ("destination", True)],
         ["distance between", "commute"]),
    ],
}

DONT_CARE_TRIGGERS = ["whatever", "no preference", "any option works", "فرقی نمیکند"]
OUT_OF_DOMAIN_TRIGGERS = ["tell me a joke", "meaning of life", "who are you"]

TRIGGER_WEIGHT = 4.0
# An utterance naming both reads as ambiguous under the default thresholds.
WEIGHT_OVERRIDES = {"distance between": 3.9}

QUESTION_TEMPLATES = [
    "Which {name} would you like?",
    "Could you tell me the {name}?",
    "What {name} should I use?",
    "Please give me the {name}.",
]
PERSIAN_TEMPLATE = "لطفا {name} را مشخص کنید."


def contains(haystack, needle):
    return re.search(r"(^|\W)" + re.escape(needle.lower()) + r"($|\W)",
                     haystack.lower()) is not None


def check_lexicon(intent_triggers):
    """No trigger or value may occur inside another intent's trigger or
    another slot's value, so every phrase is matched by its owner only."""
    phrases = [("intent " + intent, p) for intent, ps in intent_triggers.items() for p in ps]
    phrases += [("slot " + slot, v) for slot, (_, _, values, gaz) in SLOTS.items()
                for v in (values or gaz)]
    seen = set()
    for owner, phrase in phrases:
        if phrase.lower() in seen:
            raise SystemExit(f"phrase {phrase!r} is listed twice")
        seen.add(phrase.lower())
    for owner_a, a in phrases:
        for owner_b, b in phrases:
            if owner_a != owner_b and contains(b, a):
                raise SystemExit(f"{a!r} ({owner_a}) occurs inside {b!r} ({owner_b})")


def build_ontology():
    intents = []
    questions = []
    for domain, entries in DOMAINS.items():
        for intent_id, slots, _ in entries:
            slot_defs = []
            for slot_id, mandatory in slots:
                name, fa_name, values, _ = SLOTS[slot_id]
                slot_defs.append({"id": slot_id, "name": fa_name, "mandatory": mandatory,
                                  "values": values or [], "default_index": 0})
                if mandatory:
                    texts = [t.format(name=name) for t in QUESTION_TEMPLATES]
                    texts.append(PERSIAN_TEMPLATE.format(name=fa_name))
                    questions.append({"intent": intent_id, "slot": slot_id, "texts": texts})
            intents.append({"id": intent_id, "domain": domain, "special": "normal",
                            "slots": slot_defs})
    intents.append({"id": "dont_care", "domain": "general", "special": "dont_care",
                    "slots": []})
    intents.append({"id": "out_of_domain", "domain": "general", "special": "out_of_domain",
                    "slots": []})
    return {"domains": list(DOMAINS) + ["general"], "intents": intents,
            "questions": questions}


def build_lexicon():
    triggers = {intent_id: phrases for entries in DOMAINS.values()
                for intent_id, _, phrases in entries}
    triggers["dont_care"] = DONT_CARE_TRIGGERS
    triggers["out_of_domain"] = OUT_OF_DOMAIN_TRIGGERS
    check_lexicon(triggers)
    intents = [{"id": intent_id,
                "triggers": [{"phrase": p, "weight": WEIGHT_OVERRIDES.get(p, TRIGGER_WEIGHT)}
                             for p in phrases]}
               for intent_id, phrases in triggers.items()]
    slots = [{"id": slot_id, "gazetteer": values or gazetteer}
             for slot_id, (_, _, values, gazetteer) in SLOTS.items()]
    return {"temperature": 0.5, "history_weight": 3.0, "history_decay": 0.5,
            "intents": intents, "slots": slots}


def build_retrieval():
    rng = random.Random(7)
    entries = []
    conditions = ["sunny", "cloudy", "rainy", "windy", "snowy"]
    for city in SLOTS["city"][2]:
        entries.append({"intent": "get_weather", "state": {"city": city},
                        "rows": [{"condition": rng.choice(conditions),
                                  "temp_c": str(rng.randint(-5, 42))}]})
        for date in SLOTS["date"][2]:
            entries.append({"intent": "get_weather", "state": {"city": city, "date": date},
                            "rows": [{"condition": rng.choice(conditions),
                                      "temp_c": str(rng.randint(-5, 42))}]})
        for cuisine in SLOTS["cuisine"][2]:
            rows = [{"name": f"{cuisine.title()} House {i + 1}",
                     "rating": f"{rng.randint(30, 50) / 10:.1f}"}
                    for i in range(rng.randint(1, 3))]
            entries.append({"intent": "find_restaurant",
                            "state": {"city": city, "cuisine": cuisine}, "rows": rows})
    for currency in SLOTS["currency"][2]:
        for target in SLOTS["target_currency"][2]:
            entries.append({"intent": "exchange_rate",
                            "state": {"currency": currency, "target_currency": target},
                            "rows": [{"rate": str(rng.randint(10, 600000))}]})
    return {"entries": entries}


def write(path, doc):
    path.write_text(json.dumps(doc, ensure_ascii=False, indent=1) + "\n", encoding="utf-8")


def main():
    if len(sys.argv) != 2:
        raise SystemExit(__doc__)
    out = Path(sys.argv[1])
    out.mkdir(parents=True, exist_ok=True)
    write(out / "ontology.json", build_ontology())
    write(out / "lexicon.json", build_lexicon())
    write(out / "retrieval.json", build_retrieval())


if __name__ == "__main__":
    main()
