"""Regenerate the fixture lexicons, benchmark and replay files in this directory.

The word list below is the single source of the fixture pronunciations
(canonical notation). It is written out as three dictionaries that use
different notations (IPA-like, romanized, canonical) so that ingesting
and merging them exercises the normalizer.

    python fixtures/make_fixtures.py
"""

from __future__ import annotations

import json
from pathlib import Path

from llmg2p.backends import prompt_sha256
from llmg2p.lexicon import DictStore
from llmg2p.orchestrator import PromptStrategy, StrategyKind, build_prompt
from llmg2p.phonemes import parse_canonical

HERE = Path(__file__).parent

# grapheme -> canonical pronunciations
WORDS = """
این in
آن An
گل gol gel
زیبا zibA
است ast
خانه xAne
کتاب ketAb
مرد mard
زن zan
کودک kudak
آب Ab
نان nAn
روز ruz
شب Sab
ماه mAh
سال sAl
دست dast
پا pA
سر sar serr
دل del
چشم CeSm
گوش guS
دهان dahAn
شهر Sahr
کشور keSvar
ایران irAn
تهران tehrAn
مادر mAdar
پدر pedar
برادر barAdar
خواهر xAhar
دوست dust
دانشگاه dAneSgAh
دانشجو dAneSju
معلم mo?allem
مدرسه madrese
کار kAr
زندگی zendegi
مردم mardom
کوچک kuCak
بزرگ bozorg
خوب xub
بد bad
سفید sefid
سیاه sijAh
قرمز qermez
سبز sabz
آبی Abi
زرد zard
بلند boland
کوتاه kutAh
رفتن raftan
آمدن Amadan
گفتن goftan
دیدن didan
خوردن xordan
نوشتن neveStan
خواندن xAndan
رفت raft
آمد Amad
آمدند Amadand
گفت goft
دید did
کرد kard kord
شد Sod
بود bud
هست hast
نیست nist
دارد dArad
باز bAz
من man
تو to tu
او u
ما mA
شما SomA
آنها AnhA
با bA
از az
به be
در dar dorr
و va o
که ke
را rA
برای barAje
تا tA
هم ham
یک jek
دو do
سه se
چهار CahAr
پنج panJ
شش SeS
هفت haft
هشت haSt
نه noh na
ده dah deh
صد sad
هزار hezAr
کتابخانه ketAbxAne
میز miz
صندلی sandali
روی ruj
پنجره panJare
اتاق otAq
ماشین mASin
خیابان xijAbAn
کوه kuh
دریا darjA
رود rud
جنگل Jangal
درخت deraxt
باغ bAq
آسمان AsemAn
ستاره setAre
خورشید xorSid
باران bArAn
برف barf
باد bAd
هوا havA
سرد sard
گرم garm
غذا qazA
چای CAj
قهوه qahve
شیر Sir
گوشت guSt
میوه mive
سیب sib
انگور angur
نام nAm
کلمه kalame
زبان zabAn
فارسی fArsi
حرف harf
جمله Jomle
صدا sedA
شعر Se?r
کشتی keSti koSti
مهر mehr mohr
ملک malek malak molk melk
کشت keSt koSt
برد bord bard
پر por par
کم kam
زیاد zijAd
همه hame
هر har
چیز Ciz
وقت vaqt
ساعت sA?at
امروز emruz
دیروز diruz
فردا fardA
اکنون aknun
حالا hAlA
اینجا inJA
آنجا AnJA
کجا kojA
چرا CerA
چه Ce
کی kej ki
خیلی xejli
بسیار besjAr
دیگر digar
دوباره dobAre
رنگ rang
عشق ?eSq
امید omid
آرزو Arezu
شاد SAd
غم qam
ترس tars
خنده xande
گریه gerje
بچه baCCe
دختر doxtar
پسر pesar
خانواده xAnevAde
همسایه hamsAje
مهمان mehmAn
سفر safar
راه rAh
پل pol
شهرستان SahrestAn
روستا rustA
بازار bAzAr
پول pul
کیف kif
لباس lebAs
کفش kafS
ورزش varzeS
فوتبال futbAl
بازی bAzi
موسیقی musiqi
فیلم film
تلفن telefon
رادیو rAdijo
تلویزیون televizijon
اینترنت internet
علم ?elm ?alam
حکم hokm
سوال so?Al
جواب JavAb
درس dars
امتحان emtehAn
نامه nAme
روزنامه ruznAme
دفتر daftar
قلم qalam
مداد medAd
گذشته gozaSte
آینده Ajande
خدا xodA
نور nur
تاریک tArik
روشن roSan
ایستگاه istgAh
قطار qatAr
هواپیما havApejmA
دیوار divAr
زمین zamin
آتش AtaS
خاک xAk
سنگ sang
طلا talA
نقره noqre
ماهی mAhi
پرنده parande
اسب asb
سگ sag
گربه gorbe
گاو gAv
خرس xers
شیرین Sirin
تلخ talx
شور Sur
ترش toroS
تازه tAze
پیر pir
جوان JavAn
سالم sAlem
بیمار bimAr
دکتر doktor
بیمارستان bimArestAn
دارو dAru
گفت‌وگو goftogu
می‌روم miravam
می‌رود miravad
نمی‌دانم nemidAnam
کتاب‌ها ketAbhA
ویژه viZe
ژاله ZAle
مژده moZde
جزیره Jazire
دانستن dAnestan
"""

_IPA = {"A": "ɒ", "a": "æ", "S": "ʃ", "Z": "ʒ", "C": "tʃ", "J": "dʒ", "?": "ʔ", "q": "ɢ", "g": "ɡ", "r": "ɾ"}
_LONG = {"i", "u", "A"}
_ROMAN = {"A": "ā", "S": "š", "Z": "ž", "C": "č", "J": "ǰ", "?": "ʼ", "j": "y"}


def to_ipa(word: str) -> str:
    out = []
    for ch in word:
        out.append(_IPA.get(ch, ch) + ("ː" if ch in _LONG else ""))
    return "ˈ" + "".join(out)


def to_roman(word: str) -> str:
    return "".join(_ROMAN.get(ch, ch) for ch in word)


def arabic_forms(grapheme: str) -> str:
    return grapheme.replace("ی", "ي").replace("ک", "ك")


def lexicon_entries() -> list[tuple[str, list[str]]]:
    out = []
    for line in WORDS.strip().splitlines():
        g, *prons = line.split()
        for p in prons:
            parse_canonical(p)
        out.append((g, prons))
    return out


def write_lexicons() -> None:
    tihu, wiki, jame = [], [], []
    for i, (g, prons) in enumerate(lexicon_entries()):
        if len(prons) > 1:
            # alternatives are spread over the sources
            for k, p in enumerate(prons):
                [tihu, wiki, jame][k % 3].append((g, p))
            continue
        p = prons[0]
        [tihu, wiki, jame][i % 3].append((g, p))
        if i % 5 == 0:
            [tihu, wiki, jame][(i + 1) % 3].append((g, p))
    with open(HERE / "lexicon" / "tihu_ipa.tsv", "w", encoding="utf-8") as f:
        for g, p in tihu:
            f.write(f"{g}\t{to_ipa(p)}\n")
    with open(HERE / "lexicon" / "wiki_roman.tsv", "w", encoding="utf-8") as f:
        for n, (g, p) in enumerate(wiki):
            # some rows carry Arabic yeh/kaf, as scraped sources often do
            f.write(f"{arabic_forms(g) if n % 4 == 0 else g}\t{to_roman(p)}\n")
    with open(HERE / "lexicon" / "jame_canonical.tsv", "w", encoding="utf-8") as f:
        for g, p in jame:
            f.write(f"{g}\t{p}\n")


# Sentence-Bench style rows: grapheme, reference, polyphone word, pronunciation, source
BENCH = [
    ("این گل زیبا است", "in gole zibA ast", "گل", "gol", "intro-ezafe"),
    ("مرد در را باز کرد", "mard dar rA bAz kard", "در", "dar", "desk-polyphone"),
    ("کشتی در دریا است", "keSti dar darjA ast", "کشتی", "keSti", "desk-polyphone"),
    ("او کشتی را دوست دارد", "u koSti rA dust dArad", "کشتی", "koSti", "desk-polyphone"),
    ("کتاب من روی میز است", "ketAbe man ruje miz ast", "", "", "desk"),
    ("خانه ما بزرگ است", "xAneje mA bozorg ast", "", "", "desk"),
    ("شهر تهران بسیار زیبا است", "Sahre tehrAn besjAr zibA ast", "", "", "desk"),
    ("دختر کوچک به مدرسه رفت", "doxtare kuCak be madrese raft", "", "", "desk"),
    ("پدر و مادر من آمدند", "pedar o mAdare man Amadand", "", "", "desk"),
    ("آب دریا سرد است", "Abe darjA sard ast", "", "", "desk"),
    ("سال دیگر به ایران می‌روم", "sAle digar be irAn miravam", "", "", "desk"),
    ("مهر مادر بزرگ است", "mehre mAdar bozorg ast", "", "", "desk"),
]

# Finglish replies for the default strategy; row 1 drops the Ezafe on purpose.
HINTS2_REPLIES = [
    "in gol zibaa ast",
    "mard dar raa baaz kard",
    "keshti dar daryaa ast",
    "u koshti raa doost daarad",
    "ketaab-e man rooye miz ast",
    "khaane-ye maa bozorg ast",
    "shahr-e tehraan besyaar zibaa ast",
    "dokhtar-e koochak be madrese raft",
    "pedar o maadar-e man aamadand",
    "aab-e daryaa sard ast",
    "saal-e digar be iraan miravam",
    "mehr-e maadar bozorg ast",
]


def write_bench() -> None:
    with open(HERE / "sentence_bench.tsv", "w", encoding="utf-8") as f:
        f.write("grapheme\tphonemes\tpolyphone_word\tpronunciation\tsource\n")
        for row in BENCH:
            f.write("\t".join(row) + "\n")


def write_replay(store: DictStore) -> None:
    strategy = PromptStrategy.load(StrategyKind.HINTS2)
    with open(HERE / "replay_hints2.jsonl", "w", encoding="utf-8") as f:
        for (sentence, *_), reply in zip(BENCH, HINTS2_REPLIES):
            prompt = build_prompt(strategy, sentence, store)
            rec = {"prompt_sha256": prompt_sha256(prompt), "response": reply, "model": "fixture-llm"}
            f.write(json.dumps(rec, ensure_ascii=False) + "\n")


def main() -> None:
    from llmg2p.lexicon import ingest, merge, save_store

    (HERE / "lexicon").mkdir(exist_ok=True)
    write_lexicons()
    store = merge(ingest(p) for p in sorted((HERE / "lexicon").glob("*.tsv")))
    save_store(store, HERE / "merged_lexicon.tsv")
    write_bench()
    write_replay(store)
    print(f"{len(store)} lexicon entries, {len(BENCH)} benchmark rows")


if __name__ == "__main__":
    main()
