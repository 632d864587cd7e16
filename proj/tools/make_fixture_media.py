#!/usr/bin/env python3
"""Regenerates fixtures/sites/sites.json, the fixture images and the golden
page list.

Output is deterministic; rerun after editing the content tables below.
"""
import json
import math
import os
import random
import sys

from PIL import Image, ImageDraw, ImageFont

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "fixtures")
SITES = os.path.join(ROOT, "sites")
MEDIA = os.path.join(SITES, "media")
TASK_IMAGES = os.path.join(ROOT, "tasks", "images")
GOLDEN = os.path.join(ROOT, "golden")

PRODUCTS = [
    ("B07FAX0001", "Inkjet Fax Machine", "279.49", "fax.png", "Plain paper fax, copier and phone with a 20 page feeder."),
    ("B0CAMERA01", "Compact Camera", "189.99", "camera.png", "20 megapixel pocket camera with 10x optical zoom."),
    ("B0983XCYK6", "Cotton Crew Tee - Red", "14.99", "tee_red.png", "Soft cotton crew neck tee in bright red."),
    ("B0REDTEE02", "Graphic Tee - Red", "17.50", "tee_red_graphic.png", "Red tee with a printed star graphic."),
    ("B0GREENPOLO", "Classic Polo Shirt - Green", "24.00", "polo_green.png", "Pique polo shirt with a two button placket."),
    ("B0BLUEPOLO1", "Classic Polo Shirt - Blue", "24.00", "polo_blue.png", "Pique polo shirt with a two button placket."),
    ("B0BLUEMUG1", "Ceramic Mug - Blue", "9.50", "mug_blue.png", "12 oz stoneware mug, dishwasher safe."),
]

LISTINGS = [
    (101, "2012 Toyota Corolla", "30000", "Cars", "car.png", "One owner, 98k miles, new tires.", "dana_k"),
    (102, "Trail bike, barely used", "450", "Bikes", "bike_mountain.png", "Front suspension, 29 inch wheels.", "miguel_r"),
    (103, "Lightweight bike for sale", "600", "Bikes", "bike_road.png", "Aluminium frame, 22 speeds.", "sam_t"),
    (104, "Moving sale - call for details", "10", "Garage sales", "sign_0142.png", "Furniture, books and kitchenware.", "lee_w"),
    (105, "Yard sale this weekend", "5", "Garage sales", "sign_0199.png", "Toys, tools and garden items.", "pat_o"),
    (106, "Brass desk lamp", "40", "Home", "lamp.png", "Works great, bulb included.", "dana_k"),
    (107, "Oak dining table", "250", "Home", "table.png", "Seats six, minor scratches.", "sam_t"),
]

USERS = [
    ("clackmaster", "Builds keyboards on weekends."),
    ("whiskers_fan", "Two cats, zero regrets."),
    ("gearhead_42", "Fixing bikes since forever."),
    ("inkwell", "Collector of old office machines."),
    ("trailmix", "Hiking and photography."),
    ("breadboard", "Electronics tinkerer."),
    ("potluck", "Home cook."),
]

GENERIC_TITLES = [
    "Sunset over the bay last night", "My balcony garden is finally blooming", "Found this old map in the attic",
    "Weekend hike to the falls", "Homemade sourdough attempt number five", "Rainy day at the harbour",
    "Street art downtown", "First snow of the year", "Thrift store haul", "The view from my office",
    "Rebuilt an old radio", "Autumn colours in the park", "Night sky from the campsite", "Tried watercolour for the first time",
    "Farmers market finds", "Foggy morning commute", "Restored a vintage chair", "Lake at dawn",
    "Tide pools at low tide", "Desk setup update", "Breadboard synth prototype", "Herb planter build",
    "Bridge at night", "Old barn on the back road", "Snowy pine forest", "Pier at golden hour",
]

SPECIAL_POSTS = {
    412: ("Finally finished my new build", "clackmaster", "keyboard.png", "Took three weekends but it was worth it."),
    413: ("Look what I found at the flea market", "inkwell", "typewriter.png", "Still types, needs a new ribbon."),
    420: ("Meet our newest roommate", "whiskers_fan", "cat.png", "She claimed the couch within an hour."),
    428: ("Rust on my old bike chain", "gearhead_42", "chain.png", "Soaked it overnight, anyone have better tricks?"),
}


def font(size):
    for name in ("DejaVuSans-Bold.ttf", "/usr/share/fonts/truetype/dejavu/DejaVuSans-Bold.ttf"):
        try:
            return ImageFont.truetype(name, size)
        except OSError:
            pass
    return ImageFont.load_default()


def canvas(w, h, bg):
    img = Image.new("RGB", (w, h), bg)
    return img, ImageDraw.Draw(img)


def shirt(color, collar, graphic=False):
    img, d = canvas(120, 120, (245, 245, 245))
    d.polygon([(30, 25), (50, 18), (70, 18), (90, 25), (108, 45), (94, 55), (88, 48), (88, 105), (32, 105),
               (32, 48), (26, 55), (12, 45)], fill=color, outline=(40, 40, 40))
    if collar:
        d.polygon([(50, 18), (60, 34), (70, 18)], fill=(255, 255, 255), outline=(40, 40, 40))
        d.line([(60, 34), (60, 52)], fill=(40, 40, 40), width=2)
        d.ellipse([57, 38, 63, 44], fill=(230, 230, 230))
        d.ellipse([57, 46, 63, 52], fill=(230, 230, 230))
    else:
        d.arc([48, 10, 72, 30], 0, 180, fill=(40, 40, 40), width=3)
    if graphic:
        cx, cy, r = 60, 70, 16
        pts = []
        for i in range(10):
            a = math.pi / 2 + i * math.pi / 5
            rr = r if i % 2 == 0 else r * 0.45
            pts.append((cx + rr * math.cos(a), cy - rr * math.sin(a)))
        d.polygon(pts, fill=(255, 220, 0))
    return img


def fax():
    img, d = canvas(120, 120, (240, 240, 240))
    d.rectangle([15, 45, 105, 95], fill=(60, 60, 70))
    d.rectangle([30, 25, 90, 48], fill=(250, 250, 250), outline=(30, 30, 30))
    for i in range(3):
        for j in range(4):
            d.rectangle([70 + j * 8, 58 + i * 10, 75 + j * 8, 63 + i * 10], fill=(200, 200, 200))
    d.rectangle([22, 58, 62, 70], fill=(120, 180, 120))
    return img


def camera():
    img, d = canvas(120, 120, (235, 235, 240))
    d.rounded_rectangle([15, 35, 105, 90], 8, fill=(30, 30, 30))
    d.ellipse([42, 42, 82, 82], fill=(80, 80, 90), outline=(200, 200, 200), width=3)
    d.ellipse([52, 52, 72, 72], fill=(20, 20, 60))
    d.rectangle([80, 28, 98, 35], fill=(30, 30, 30))
    return img


def mug():
    img, d = canvas(120, 120, (250, 250, 250))
    d.rectangle([30, 30, 80, 95], fill=(40, 90, 200))
    d.ellipse([72, 45, 100, 80], outline=(40, 90, 200), width=7)
    return img


def car():
    img, d = canvas(160, 120, (200, 225, 245))
    d.rectangle([0, 90, 160, 120], fill=(90, 90, 90))
    d.rounded_rectangle([15, 55, 145, 92], 10, fill=(180, 20, 30))
    d.polygon([(45, 55), (60, 35), (110, 35), (125, 55)], fill=(180, 20, 30))
    d.polygon([(52, 55), (64, 40), (84, 40), (84, 55)], fill=(170, 210, 240))
    d.polygon([(88, 55), (88, 40), (106, 40), (118, 55)], fill=(170, 210, 240))
    for x in (45, 115):
        d.ellipse([x - 13, 80, x + 13, 106], fill=(20, 20, 20))
        d.ellipse([x - 6, 87, x + 6, 99], fill=(160, 160, 160))
    return img


def bike(kind):
    img, d = canvas(160, 120, (235, 240, 230))
    rng = random.Random(7)
    for _ in range(40):
        x, y = rng.randrange(160), rng.randrange(100)
        d.point((x, y), fill=(220, 228, 215))
    d.rectangle([0, 100, 160, 120], fill=(120, 100, 80) if kind == "mountain" else (110, 110, 110))
    rw = 24 if kind == "mountain" else 26
    back, front = (40, 78), (120, 78)
    wheel_w = 6 if kind == "mountain" else 2
    for cx, cy in (back, front):
        d.ellipse([cx - rw, cy - rw, cx + rw, cy + rw], outline=(20, 20, 20), width=wheel_w)
        for k in range(6 if kind == "mountain" else 12):
            a = k * math.pi / (3 if kind == "mountain" else 6)
            d.line([(cx, cy), (cx + (rw - 2) * math.cos(a), cy + (rw - 2) * math.sin(a))], fill=(150, 150, 150))
    frame = (30, 110, 40) if kind == "mountain" else (200, 40, 40)
    seat, head, crank = (62, 45), (108, 42), (75, 80)
    if kind == "road":
        seat, head = (60, 38), (110, 40)
    d.line([back, seat, crank, back], fill=frame, width=5)
    d.line([seat, head, crank], fill=frame, width=5)
    d.line([head, front], fill=frame, width=5)
    d.rectangle([seat[0] - 9, seat[1] - 5, seat[0] + 7, seat[1] - 1], fill=(20, 20, 20))
    if kind == "mountain":
        d.line([(head[0] - 8, head[1] - 8), (head[0] + 10, head[1] - 8)], fill=(20, 20, 20), width=4)
    else:
        d.arc([head[0] - 2, head[1] - 10, head[0] + 14, head[1] + 6], 270, 90, fill=(20, 20, 20), width=3)
    return img


def sign(number, bg):
    img, d = canvas(160, 120, (130, 170, 110))
    d.rectangle([74, 70, 84, 120], fill=(110, 80, 50))
    d.rectangle([10, 10, 150, 78], fill=bg, outline=(30, 30, 30), width=3)
    d.text((22, 16), "SALE", font=font(20), fill=(200, 0, 0))
    d.text((18, 46), number, font=font(20), fill=(0, 0, 0))
    return img


def lamp():
    img, d = canvas(160, 120, (250, 245, 230))
    d.polygon([(60, 20), (100, 20), (115, 55), (45, 55)], fill=(240, 220, 120))
    d.rectangle([77, 55, 83, 100], fill=(180, 140, 40))
    d.rectangle([55, 100, 105, 108], fill=(180, 140, 40))
    return img


def table():
    img, d = canvas(160, 120, (245, 240, 235))
    d.rectangle([20, 45, 140, 55], fill=(150, 100, 50))
    for x in (28, 124):
        d.rectangle([x, 55, x + 8, 105], fill=(130, 85, 40))
    return img


def keyboard():
    img, d = canvas(160, 160, (60, 60, 70))
    d.rounded_rectangle([10, 50, 150, 115], 6, fill=(200, 200, 205))
    for row in range(4):
        for col in range(10):
            x = 16 + col * 13 + (row % 2) * 4
            y = 56 + row * 14
            d.rectangle([x, y, x + 10, y + 11], fill=(250, 250, 250), outline=(120, 120, 120))
    d.rectangle([50, 100, 110, 110], fill=(250, 250, 250), outline=(120, 120, 120))
    return img


def typewriter():
    img, d = canvas(160, 160, (230, 220, 200))
    d.rounded_rectangle([25, 60, 135, 125], 10, fill=(40, 60, 50))
    d.rectangle([20, 45, 140, 58], fill=(30, 30, 30))
    d.rectangle([50, 25, 110, 47], fill=(250, 250, 245))
    for row in range(3):
        for col in range(8):
            d.ellipse([38 + col * 11, 80 + row * 12, 46 + col * 11, 88 + row * 12], fill=(220, 220, 220))
    return img


def cat():
    img, d = canvas(160, 160, (170, 200, 230))
    orange, dark = (235, 135, 40), (190, 95, 20)
    d.ellipse([40, 70, 130, 140], fill=orange)
    d.ellipse([45, 30, 105, 90], fill=orange)
    d.polygon([(50, 45), (55, 15), (72, 35)], fill=orange)
    d.polygon([(100, 45), (95, 15), (78, 35)], fill=orange)
    for y in (80, 95, 110):
        d.line([(70, y), (120, y)], fill=dark, width=4)
    d.ellipse([60, 50, 68, 58], fill=(30, 120, 30))
    d.ellipse([82, 50, 90, 58], fill=(30, 120, 30))
    d.polygon([(72, 66), (78, 66), (75, 70)], fill=(200, 80, 90))
    return img


def chain():
    img, d = canvas(160, 160, (80, 70, 60))
    for i in range(7):
        x = 10 + i * 21
        d.rounded_rectangle([x, 65, x + 26, 95], 12, outline=(150, 80, 30), width=5)
        d.ellipse([x + 8, 75, x + 18, 85], fill=(110, 60, 25))
    return img


def generic(seed):
    rng = random.Random(seed)
    top = tuple(rng.randrange(90, 230) for _ in range(3))
    bottom = tuple(rng.randrange(30, 160) for _ in range(3))
    img, d = canvas(160, 160, top)
    horizon = rng.randrange(70, 110)
    d.rectangle([0, horizon, 160, 160], fill=bottom)
    for _ in range(3):
        x, y, r = rng.randrange(10, 150), rng.randrange(15, horizon), rng.randrange(8, 20)
        d.ellipse([x - r, y - r, x + r, y + r], fill=tuple(rng.randrange(0, 256) for _ in range(3)))
    return img


def save(img, *parts):
    path = os.path.join(*parts)
    os.makedirs(os.path.dirname(path), exist_ok=True)
    img.save(path, optimize=False, compress_level=9)


def golden_pages(data):
    pages = [
        ("shop_home", "/shop/"),
        ("shop_search_tee", "/shop/search?q=tee"),
        ("shop_search_purple_polo", "/shop/search?q=purple+polo"),
        ("shop_cart", "/shop/cart"),
        ("shop_orders", "/shop/orders"),
        ("shop_wishlist", "/shop/wishlist"),
    ]
    pages += [("shop_product_" + p["sku"], "/shop/product/" + p["sku"]) for p in data["shop"]["products"]]
    pages += [
        ("classifieds_home", "/classifieds/"),
        ("classifieds_search_bike", "/classifieds/search?q=bike"),
        ("classifieds_favorites", "/classifieds/favorites"),
    ]
    for item in data["classifieds"]["listings"]:
        pages.append(("classifieds_item_%d" % item["id"], "/classifieds/item/%d" % item["id"]))
        pages.append(("classifieds_item_%d_edit" % item["id"], "/classifieds/item/%d/edit" % item["id"]))
    pages += [
        ("forum_home", "/forum/"),
        ("forum_search_bike", "/forum/search?q=bike"),
        ("forum_users", "/forum/users"),
    ]
    pages += [("forum_post_%d" % p["id"], "/forum/post/%d" % p["id"]) for p in data["forum"]["posts"]]
    pages += [("forum_user_" + u["name"], "/forum/user/" + u["name"]) for u in data["forum"]["users"]]
    pages.append(("not_found", "/shop/no-such-page"))
    return [{"name": n, "url": u} for n, u in pages]


def main():
    images = {
        ("shop", "fax.png"): fax(),
        ("shop", "camera.png"): camera(),
        ("shop", "tee_red.png"): shirt((210, 30, 40), False),
        ("shop", "tee_red_graphic.png"): shirt((200, 25, 35), False, graphic=True),
        ("shop", "polo_green.png"): shirt((40, 150, 60), True),
        ("shop", "polo_blue.png"): shirt((40, 80, 190), True),
        ("shop", "mug_blue.png"): mug(),
        ("classifieds", "car.png"): car(),
        ("classifieds", "bike_mountain.png"): bike("mountain"),
        ("classifieds", "bike_road.png"): bike("road"),
        ("classifieds", "sign_0142.png"): sign("555-0142", (255, 250, 200)),
        ("classifieds", "sign_0199.png"): sign("555-0199", (255, 255, 255)),
        ("classifieds", "lamp.png"): lamp(),
        ("classifieds", "table.png"): table(),
        ("forum", "keyboard.png"): keyboard(),
        ("forum", "typewriter.png"): typewriter(),
        ("forum", "cat.png"): cat(),
        ("forum", "chain.png"): chain(),
    }
    posts = []
    generic_iter = iter(GENERIC_TITLES)
    authors = ["trailmix", "breadboard", "potluck", "inkwell", "trailmix", "potluck"]
    for pid in range(401, 431):
        if pid in SPECIAL_POSTS:
            title, author, image, body = SPECIAL_POSTS[pid]
        else:
            title = next(generic_iter)
            author = authors[pid % len(authors)]
            image = "photo_%d.png" % pid
            body = "Posted from my phone."
            images[("forum", image)] = generic(pid)
        comments = []
        if pid == 420:
            comments = [{"author": "trailmix", "text": "Adorable!"}]
        elif pid % 3 == 0:
            comments = [{"author": "potluck", "text": "Nice one."}]
        posts.append({"id": pid, "title": title, "author": author, "image": image, "body": body,
                      "comments": comments})

    data = {
        "shop": {
            "name": "One Stop Market",
            "products": [{"sku": s, "name": n, "price": p, "image": i, "description": d}
                         for s, n, p, i, d in PRODUCTS],
        },
        "classifieds": {
            "name": "Classifieds",
            "listings": [{"id": i, "title": t, "price": p, "category": c, "image": im, "description": d, "seller": s}
                         for i, t, p, c, im, d, s in LISTINGS],
        },
        "forum": {
            "name": "Postmill",
            "posts": posts,
            "users": [{"name": n, "bio": b} for n, b in USERS],
        },
    }
    os.makedirs(SITES, exist_ok=True)
    with open(os.path.join(SITES, "sites.json"), "w") as f:
        json.dump(data, f, indent=1)
        f.write("\n")
    os.makedirs(GOLDEN, exist_ok=True)
    with open(os.path.join(GOLDEN, "pages.json"), "w") as f:
        json.dump(golden_pages(data), f, indent=1)
        f.write("\n")
    for (site, name), img in sorted(images.items()):
        save(img, MEDIA, site, name)
    save(images[("shop", "polo_green.png")], TASK_IMAGES, "polo_green.png")
    save(images[("classifieds", "bike_mountain.png")], TASK_IMAGES, "bike_mountain.png")
    return 0


if __name__ == "__main__":
    sys.exit(main())
