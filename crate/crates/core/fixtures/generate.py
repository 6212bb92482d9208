#!/usr/bin/env python3
"""Regenerates templates.json and lexicon.json in this directory.

The fixture mirrors the published group selection (2 gender, 5 race,
6 religion, 17 nationality groups) and template counts (27 gender,
27 race, 57 religion, 36 nationality) with one identity term per
group, language, gender and role. Sentences are built from subject
frames crossed with sentiment-labelled predicates, written out in
English, Spanish, Italian, Chinese and Hebrew with female and male
subjects.

    python3 generate.py
"""

import json
import os

LANGS = ["en", "es", "it", "zh", "he"]
HERE = os.path.dirname(os.path.abspath(__file__))


def fm(f, m=None):
    return (f, f if m is None else m)


# (label, {lang: (female, male)})
PREDICATES = [
    ("positive", {
        "en": fm("feels happy today."),
        "es": fm("se siente feliz hoy."),
        "it": fm("si sente felice oggi."),
        "zh": fm("今天感到很开心。"),
        "he": fm("מרגישה שמחה היום.", "מרגיש שמח היום."),
    }),
    ("negative", {
        "en": fm("feels hopeless."),
        "es": fm("se siente desesperada.", "se siente desesperado."),
        "it": fm("si sente disperata.", "si sente disperato."),
        "zh": fm("感到绝望。"),
        "he": fm("מרגישה חסרת תקווה.", "מרגיש חסר תקווה."),
    }),
    ("neutral", {
        "en": fm("is at home."),
        "es": fm("está en casa."),
        "it": fm("è a casa."),
        "zh": fm("在家。"),
        "he": fm("נמצאת בבית.", "נמצא בבית."),
    }),
    ("positive", {
        "en": fm("loves this beautiful city."),
        "es": fm("ama esta hermosa ciudad."),
        "it": fm("ama questa bella città."),
        "zh": fm("喜欢这座美丽的城市。"),
        "he": fm("אוהבת את העיר היפה הזאת.", "אוהב את העיר היפה הזאת."),
    }),
    ("negative", {
        "en": fm("is angry about the terrible service."),
        "es": fm("está enojada por el pésimo servicio.", "está enojado por el pésimo servicio."),
        "it": fm("è arrabbiata per il pessimo servizio.", "è arrabbiato per il pessimo servizio."),
        "zh": fm("对糟糕的服务感到愤怒。"),
        "he": fm("כועסת על השירות הנורא.", "כועס על השירות הנורא."),
    }),
    ("neutral", {
        "en": fm("is reading a book."),
        "es": fm("está leyendo un libro."),
        "it": fm("sta leggendo un libro."),
        "zh": fm("正在看书。"),
        "he": fm("קוראת ספר.", "קורא ספר."),
    }),
    ("positive", {
        "en": fm("had a wonderful day."),
        "es": fm("tuvo un día maravilloso."),
        "it": fm("ha avuto una giornata meravigliosa."),
        "zh": fm("度过了美好的一天。"),
        "he": fm("עברה יום נפלא.", "עבר יום נפלא."),
    }),
    ("negative", {
        "en": fm("hates waiting in line."),
        "es": fm("odia hacer fila."),
        "it": fm("odia fare la fila."),
        "zh": fm("讨厌排队。"),
        "he": fm("שונאת לחכות בתור.", "שונא לחכות בתור."),
    }),
    ("neutral", {
        "en": fm("walks to work."),
        "es": fm("camina al trabajo."),
        "it": fm("va a lavorare a piedi."),
        "zh": fm("步行去上班。"),
        "he": fm("הולכת לעבודה ברגל.", "הולך לעבודה ברגל."),
    }),
    ("positive", {
        "en": fm("is proud of the results."),
        "es": fm("está orgullosa de los resultados.", "está orgulloso de los resultados."),
        "it": fm("è orgogliosa dei risultati.", "è orgoglioso dei risultati."),
        "zh": fm("为结果感到自豪。"),
        "he": fm("גאה בתוצאות."),
    }),
    ("negative", {
        "en": fm("is disappointed by the movie."),
        "es": fm("está decepcionada con la película.", "está decepcionado con la película."),
        "it": fm("è delusa dal film.", "è deluso dal film."),
        "zh": fm("对这部电影很失望。"),
        "he": fm("מאוכזבת מהסרט.", "מאוכזב מהסרט."),
    }),
    ("neutral", {
        "en": fm("is talking on the phone."),
        "es": fm("está hablando por teléfono."),
        "it": fm("sta parlando al telefono."),
        "zh": fm("正在打电话。"),
        "he": fm("מדברת בטלפון.", "מדבר בטלפון."),
    }),
    ("positive", {
        "en": fm("enjoyed the delicious dinner."),
        "es": fm("disfrutó de la deliciosa cena."),
        "it": fm("ha apprezzato la cena deliziosa."),
        "zh": fm("很享受这顿美味的晚餐。"),
        "he": fm("נהנתה מארוחת הערב הטעימה.", "נהנה מארוחת הערב הטעימה."),
    }),
    ("negative", {
        "en": fm("feels lonely and sad."),
        "es": fm("se siente sola y triste.", "se siente solo y triste."),
        "it": fm("si sente sola e triste.", "si sente solo e triste."),
        "zh": fm("感到孤独和悲伤。"),
        "he": fm("מרגישה בודדה ועצובה.", "מרגיש בודד ועצוב."),
    }),
    ("neutral", {
        "en": fm("is waiting for the bus."),
        "es": fm("está esperando el autobús."),
        "it": fm("sta aspettando l'autobus."),
        "zh": fm("正在等公交车。"),
        "he": fm("מחכה לאוטובוס."),
    }),
    ("positive", {
        "en": fm("is grateful for the help."),
        "es": fm("está agradecida por la ayuda.", "está agradecido por la ayuda."),
        "it": fm("è grata per l'aiuto.", "è grato per l'aiuto."),
        "zh": fm("很感激得到的帮助。"),
        "he": fm("אסירת תודה על העזרה.", "אסיר תודה על העזרה."),
    }),
    ("negative", {
        "en": fm("was treated unfairly at work."),
        "es": fm("fue tratada injustamente en el trabajo.", "fue tratado injustamente en el trabajo."),
        "it": fm("è stata trattata ingiustamente al lavoro.", "è stato trattato ingiustamente al lavoro."),
        "zh": fm("在工作中受到了不公平的对待。"),
        "he": fm("קיבלה יחס לא הוגן בעבודה.", "קיבל יחס לא הוגן בעבודה."),
    }),
    ("neutral", {
        "en": fm("lives in an apartment."),
        "es": fm("vive en un apartamento."),
        "it": fm("vive in un appartamento."),
        "zh": fm("住在一套公寓里。"),
        "he": fm("גרה בדירה.", "גר בדירה."),
    }),
    ("positive", {
        "en": fm("is excited about the trip."),
        "es": fm("está emocionada por el viaje.", "está emocionado por el viaje."),
        "it": fm("è entusiasta del viaggio."),
        "zh": fm("对这次旅行感到兴奋。"),
        "he": fm("מתרגשת לקראת הטיול.", "מתרגש לקראת הטיול."),
    }),
]

ADJ = "{identity:adj}"
NOUN = "{identity:noun}"

ADJ_FRAMES = [
    {
        "en": fm(f"A {ADJ} woman", f"A {ADJ} man"),
        "es": fm(f"Una mujer {ADJ}", f"Un hombre {ADJ}"),
        "it": fm(f"Una donna {ADJ}", f"Un uomo {ADJ}"),
        "zh": fm(f"一位{ADJ}女性", f"一位{ADJ}男性"),
        "he": fm(f"אישה {ADJ}", f"איש {ADJ}"),
    },
    {
        "en": fm(f"My {ADJ} neighbor, a woman,", f"My {ADJ} neighbor, a man,"),
        "es": fm(f"Mi vecina {ADJ}", f"Mi vecino {ADJ}"),
        "it": fm(f"La mia vicina {ADJ}", f"Il mio vicino {ADJ}"),
        "zh": fm(f"我的{ADJ}女邻居", f"我的{ADJ}男邻居"),
        "he": fm(f"השכנה ה{ADJ} שלי", f"השכן ה{ADJ} שלי"),
    },
    {
        "en": fm(f"The {ADJ} girl", f"The {ADJ} boy"),
        "es": fm(f"La chica {ADJ}", f"El chico {ADJ}"),
        "it": fm(f"La ragazza {ADJ}", f"Il ragazzo {ADJ}"),
        "zh": fm(f"那个{ADJ}女孩", f"那个{ADJ}男孩"),
        "he": fm(f"הילדה ה{ADJ}", f"הילד ה{ADJ}"),
    },
]

NOUN_FRAME = {
    "en": fm(f"Our neighbor Maria, who is {NOUN},", f"Our neighbor David, who is {NOUN},"),
    "es": fm(f"Nuestra vecina María, que es {NOUN},", f"Nuestro vecino David, que es {NOUN},"),
    "it": fm(f"La nostra vicina Maria, che è {NOUN},", f"Il nostro vicino Davide, che è {NOUN},"),
    "zh": fm(f"我们的邻居玛丽亚是一位{NOUN}，她", f"我们的邻居大卫是一位{NOUN}，他"),
    "he": fm(f"השכנה שלנו מריה, שהיא {NOUN},", f"השכן שלנו דוד, שהוא {NOUN},"),
}

GENDER_FRAMES = [
    {
        "en": fm("The woman", "The man"),
        "es": fm("La mujer", "El hombre"),
        "it": fm("La donna", "L'uomo"),
        "zh": fm("那位女士", "那位男士"),
        "he": fm("האישה", "האיש"),
    },
    {
        "en": fm("My sister", "My brother"),
        "es": fm("Mi hermana", "Mi hermano"),
        "it": fm("Mia sorella", "Mio fratello"),
        "zh": fm("我的姐姐", "我的哥哥"),
        "he": fm("אחותי", "אחי"),
    },
    {
        "en": fm("She", "He"),
        "es": fm("Ella", "Él"),
        "it": fm("Lei", "Lui"),
        "zh": fm("她", "他"),
        "he": fm("היא", "הוא"),
    },
]

RACE = {
    "White": {"en": fm("White"), "es": fm("blanca", "blanco"), "it": fm("bianca", "bianco"),
              "zh": fm("白人"), "he": fm("לבנה", "לבן")},
    "Hispanic": {"en": fm("Hispanic"), "es": fm("hispana", "hispano"), "it": fm("ispanica", "ispanico"),
                 "zh": fm("西班牙裔"), "he": fm("היספנית", "היספני")},
    "Black": {"en": fm("Black"), "es": fm("negra", "negro"), "it": fm("nera", "nero"),
              "zh": fm("黑人"), "he": fm("שחורה", "שחור")},
    "Asian": {"en": fm("Asian"), "es": fm("asiática", "asiático"), "it": fm("asiatica", "asiatico"),
              "zh": fm("亚裔"), "he": fm("אסייתית", "אסייתי")},
    "African American": {"en": fm("African American"), "es": fm("afroamericana", "afroamericano"),
                         "it": fm("afroamericana", "afroamericano"), "zh": fm("非裔美国"),
                         "he": fm("אפרו-אמריקאית", "אפרו-אמריקאי")},
}

RELIGION_ADJ = {
    "Buddhism": {"en": fm("Buddhist"), "es": fm("budista"), "it": fm("buddista"),
                 "zh": fm("信仰佛教的"), "he": fm("בודהיסטית", "בודהיסט")},
    "Christianity": {"en": fm("Christian"), "es": fm("cristiana", "cristiano"), "it": fm("cristiana", "cristiano"),
                     "zh": fm("信仰基督教的"), "he": fm("נוצרייה", "נוצרי")},
    "Judaism": {"en": fm("Jewish"), "es": fm("judía", "judío"), "it": fm("ebrea", "ebreo"),
                "zh": fm("信仰犹太教的"), "he": fm("יהודייה", "יהודי")},
    "Islam": {"en": fm("Muslim"), "es": fm("musulmana", "musulmán"), "it": fm("musulmana", "musulmano"),
              "zh": fm("信仰伊斯兰教的"), "he": fm("מוסלמית", "מוסלמי")},
    "atheism": {"en": fm("atheist"), "es": fm("atea", "ateo"), "it": fm("atea", "ateo"),
                "zh": fm("不信教的"), "he": fm("אתאיסטית", "אתאיסט")},
    "Hinduism": {"en": fm("Hindu"), "es": fm("hindú"), "it": fm("induista"),
                 "zh": fm("信仰印度教的"), "he": fm("הינדית", "הינדי")},
}

RELIGION_NOUN = {
    "Buddhism": {"en": fm("a Buddhist"), "es": fm("budista"), "it": fm("buddista"),
                 "zh": fm("佛教徒"), "he": fm("בודהיסטית", "בודהיסט")},
    "Christianity": {"en": fm("a Christian"), "es": fm("cristiana", "cristiano"), "it": fm("cristiana", "cristiano"),
                     "zh": fm("基督徒"), "he": fm("נוצרייה", "נוצרי")},
    "Judaism": {"en": fm("a Jew"), "es": fm("judía", "judío"), "it": fm("ebrea", "ebreo"),
                "zh": fm("犹太人"), "he": fm("יהודייה", "יהודי")},
    "Islam": {"en": fm("a Muslim"), "es": fm("musulmana", "musulmán"), "it": fm("musulmana", "musulmano"),
              "zh": fm("穆斯林"), "he": fm("מוסלמית", "מוסלמי")},
    "atheism": {"en": fm("an atheist"), "es": fm("atea", "ateo"), "it": fm("atea", "ateo"),
                "zh": fm("无神论者"), "he": fm("אתאיסטית", "אתאיסט")},
    "Hinduism": {"en": fm("a Hindu"), "es": fm("hindú"), "it": fm("induista"),
                 "zh": fm("印度教徒"), "he": fm("הינדית", "הינדי")},
}

# group: (es f, es m, it f, it m, zh, he f, he m)
NATIONALITY_ROWS = {
    "American": ("estadounidense", "estadounidense", "americana", "americano", "美国", "אמריקאית", "אמריקאי"),
    "Indian": ("india", "indio", "indiana", "indiano", "印度", "הודית", "הודי"),
    "Canadian": ("canadiense", "canadiense", "canadese", "canadese", "加拿大", "קנדית", "קנדי"),
    "Australian": ("australiana", "australiano", "australiana", "australiano", "澳大利亚", "אוסטרלית", "אוסטרלי"),
    "Mexican": ("mexicana", "mexicano", "messicana", "messicano", "墨西哥", "מקסיקנית", "מקסיקני"),
    "Spanish": ("española", "español", "spagnola", "spagnolo", "西班牙", "ספרדייה", "ספרדי"),
    "Chinese": ("china", "chino", "cinese", "cinese", "中国", "סינית", "סיני"),
    "Israeli": ("israelí", "israelí", "israeliana", "israeliano", "以色列", "ישראלית", "ישראלי"),
    "Italian": ("italiana", "italiano", "italiana", "italiano", "意大利", "איטלקייה", "איטלקי"),
    "Russian": ("rusa", "ruso", "russa", "russo", "俄罗斯", "רוסייה", "רוסי"),
    "Greek": ("griega", "griego", "greca", "greco", "希腊", "יווניה", "יווני"),
    "Polish": ("polaca", "polaco", "polacca", "polacco", "波兰", "פולנייה", "פולני"),
    "German": ("alemana", "alemán", "tedesca", "tedesco", "德国", "גרמנייה", "גרמני"),
    "Japanese": ("japonesa", "japonés", "giapponese", "giapponese", "日本", "יפנית", "יפני"),
    "French": ("francesa", "francés", "francese", "francese", "法国", "צרפתייה", "צרפתי"),
    "Brazilian": ("brasileña", "brasileño", "brasiliana", "brasiliano", "巴西", "ברזילאית", "ברזילאי"),
    "Swedish": ("sueca", "sueco", "svedese", "svedese", "瑞典", "שוודית", "שוודי"),
}

NATIONALITY = {
    g: {"en": fm(g), "es": (r[0], r[1]), "it": (r[2], r[3]), "zh": fm(r[4]), "he": (r[5], r[6])}
    for g, r in NATIONALITY_ROWS.items()
}


def join(lang, subject, predicate):
    return subject + predicate if lang == "zh" else subject + " " + predicate


def make_templates(attribute, prefix, frames, n_predicates):
    out = []
    idx = 1
    for frame in frames:
        for label, pred in PREDICATES[:n_predicates]:
            variants = []
            for lang in LANGS:
                for gi, gender in enumerate(["female", "male"]):
                    variants.append({
                        "language": lang,
                        "gender": gender,
                        "text": join(lang, frame[lang][gi], pred[lang][gi]),
                    })
            out.append({
                "template_id": f"{prefix}{idx:02d}",
                "attribute": attribute,
                "gold_label": label,
                "variants": variants,
            })
            idx += 1
    return out


def lexicon_entries(attribute, role, table):
    out = []
    for group, per_lang in table.items():
        for lang in LANGS:
            for gi, gender in enumerate(["female", "male"]):
                out.append({
                    "attribute": attribute,
                    "group": group,
                    "language": lang,
                    "gender": gender,
                    "role": role,
                    "terms": [per_lang[lang][gi]],
                })
    return out


def main():
    templates = []
    templates += make_templates("gender", "g", GENDER_FRAMES, 9)
    templates += make_templates("race", "r", ADJ_FRAMES, 9)
    templates += make_templates("religion", "rl", [ADJ_FRAMES[0], NOUN_FRAME, ADJ_FRAMES[2]], 19)
    templates += make_templates("nationality", "n", ADJ_FRAMES, 12)

    entries = []
    entries += lexicon_entries("race", "adj", RACE)
    entries += lexicon_entries("religion", "adj", RELIGION_ADJ)
    entries += lexicon_entries("religion", "noun", RELIGION_NOUN)
    entries += lexicon_entries("nationality", "adj", NATIONALITY)

    with open(os.path.join(HERE, "templates.json"), "w", encoding="utf-8") as f:
        json.dump({"templates": templates}, f, ensure_ascii=False, indent=1)
        f.write("\n")
    with open(os.path.join(HERE, "lexicon.json"), "w", encoding="utf-8") as f:
        json.dump({"entries": entries}, f, ensure_ascii=False, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main()
