"""The four mock apps shipped as app packs.

Click triggers and text effects name their node with a selector (attribute
values); ``resolve_pack`` turns selectors into positional xpaths.
"""

from __future__ import annotations

from layout import H, W, E, gap, page

from touchstone.vh import parse_vh, xpath_of

EXCEL = "com.microsoft.office.excel"
STORE = "com.android.vending"
LAUNCHER = "com.google.android.apps.nexuslauncher"
SETTINGS = "com.android.settings"
CANDY = "com.king.candycrushsaga"
SHOP = "com.bestbuy.android"
NOTES = "com.example.notes"

BASE_PACKAGES = ["com.android.chrome", "com.google.android.apps.messaging", "com.google.android.dialer",
                 LAUNCHER, SETTINGS, STORE]


def T(text, rid="", **kw):
    return E("Text", text, rid, **kw)


def tap(text, rid="", **kw):
    return E("Text", text, rid, clickable=True, focusable=True, **kw)


# -- launcher + play store + excel -------------------------------------------------------

def _home(with_excel):
    icons = [("Phone", "com.google.android.dialer"), ("Messages", "com.google.android.apps.messaging"),
             ("Chrome", "com.android.chrome"), ("Play Store", STORE)]
    row2 = [("Camera", ""), ("Photos", ""), ("Settings", SETTINGS), ("Files", "")]
    if with_excel:
        row2[3] = ("Excel", EXCEL)

    def icon(label):
        return E("Text", label, f"{LAUNCHER}:id/icon", desc=label, clickable=True, long_clickable=True, h=260)

    return page(LAUNCHER, [
        gap(120),
        T("12:30", f"{LAUNCHER}:id/clock", h=220),
        E("Text", "Search", f"{LAUNCHER}:id/search_container", desc="Google search", clickable=True, h=160),
        gap(1200),
        E("Linear", kids=[icon(a) for a, _ in row2], layout="h", h=260, pad=40),
        gap(60),
        E("Linear", kids=[icon(a) for a, _ in icons], layout="h", h=260, pad=40),
    ])


def _store_search_box(text, focused):
    return E("Edit", text, f"{STORE}:id/search_bar_text", clickable=True, focused=focused, h=150)


def _store_home():
    return page(STORE, [
        gap(100),
        E("Linear", kids=[_store_search_box("Search for apps & games", True)], pad=40, h=150),
        E("Linear", kids=[tap(t, f"{STORE}:id/tab", selected=(t == "For you")) for t in
                          ("For you", "Top charts", "Kids", "Categories")], layout="h", h=140),
        T("Recommended for you", f"{STORE}:id/header", h=160),
        tap("Candy Crush Saga", f"{STORE}:id/title", h=200),
        tap("Spotify: Music and Podcasts", f"{STORE}:id/title", h=200),
        tap("TikTok", f"{STORE}:id/title", h=200),
        tap("Duolingo: language lessons", f"{STORE}:id/title", h=200),
    ])


def _store_results():
    def result(title, sub):
        return E("Linear", kids=[tap(title, f"{STORE}:id/title", h=120), T(sub, f"{STORE}:id/subtitle", h=80)],
                 h=220, pad=40)

    return page(STORE, [
        gap(100),
        E("Linear", kids=[E("ImageButton", desc="Navigate up", clickable=True), _store_search_box("", False)],
          layout="h", h=150),
        result("Microsoft Excel: Spreadsheets", "Microsoft Corporation"),
        result("Google Sheets", "Google LLC"),
        result("WPS Office-PDF,Word,Sheet,PPT", "WPS SOFTWARE PTE. LTD."),
        result("Spreadsheet Editor", "Mobile Systems"),
    ])


def _store_app(installed):
    buttons = ([E("Button", "Uninstall", f"{STORE}:id/uninstall", clickable=True),
                E("Button", "Open", f"{STORE}:id/open", clickable=True)] if installed
               else [E("Button", "Install", f"{STORE}:id/install", clickable=True)])
    return page(STORE, [
        gap(100),
        E("ImageButton", desc="Navigate up", clickable=True, h=140),
        T("Microsoft Excel: Spreadsheets", f"{STORE}:id/app_title", h=160),
        T("Microsoft Corporation", f"{STORE}:id/developer", h=100),
        T("4.5 star", f"{STORE}:id/rating", h=100),
        E("Linear", kids=buttons, layout="h", h=160, pad=40),
        T("About this app", f"{STORE}:id/about_header", h=140),
        T("Create, edit and share spreadsheets", f"{STORE}:id/about_text", h=200),
    ])


def _excel_welcome():
    return page(EXCEL, [
        gap(300),
        E("Image", desc="Excel logo", h=400),
        T("Welcome to Excel", f"{EXCEL}:id/welcome_title", h=160),
        T("Create, view, edit and share your spreadsheets", f"{EXCEL}:id/welcome_body", h=200),
        gap(600),
        E("Button", "Sign in", f"{EXCEL}:id/sign_in_button", clickable=True, h=160),
        E("Button", "Skip for now", f"{EXCEL}:id/skip_button", clickable=True, h=160),
    ])


def _excel_login():
    return page(EXCEL, [
        gap(300),
        E("Image", desc="Microsoft logo", h=200),
        T("Sign in", "com.microsoft.identity:id/title", h=180),
        E("Edit", "Email, phone, or Skype", "com.microsoft.identity:id/email", clickable=True, h=160),
        T("No account? Create one!", "com.microsoft.identity:id/create", clickable=True, h=120),
        E("Button", "Next", "com.microsoft.identity:id/next", clickable=True, h=160),
    ])


def excel_pack():
    home = "com.google.android.apps.nexuslauncher.NexusLauncherActivity"
    store = "com.android.vending.AssetBrowserActivity"
    screens = {
        "home": (home, _home(False), "#dfe9f5"),
        "home_excel": (home, _home(True), "#dfe9f5"),
        "store_home": (store, _store_home(), "#ffffff"),
        "store_results": (store, _store_results(), "#ffffff"),
        "store_app": (store, _store_app(False), "#ffffff"),
        "store_app_installed": (store, _store_app(True), "#ffffff"),
        "excel_welcome": ("com.microsoft.office.apphost.LaunchActivity", _excel_welcome(), "#e8f3ec"),
        "excel_login": ("com.microsoft.identity.client.BrowserTabActivity", _excel_login(), "#ffffff"),
    }
    not_inst, inst = {"not_installed": EXCEL}, {"installed": EXCEL}
    result = {"text": "Microsoft Excel: Spreadsheets"}
    transitions = [
        ("home", {"text": "Play Store"}, "store_home"),
        ("home_excel", {"text": "Play Store"}, "store_home"),
        ("home_excel", {"text": "Excel"}, "excel_welcome"),
        {"from": "store_home", "on": {"kind": "type"}, "to": "store_results",
         "effects": [{"carry_text": {"from": {"resource-id": f"{STORE}:id/search_bar_text"},
                                     "to": {"resource-id": f"{STORE}:id/search_bar_text"}}}]},
        ("store_results", result, "store_app", not_inst),
        ("store_results", result, "store_app_installed", inst),
        ("store_results", {"content-desc": "Navigate up"}, "store_home"),
        {"from": "store_app", "on": {"kind": "click", "target": {"text": "Install"}}, "to": "store_app_installed",
         "effects": [{"install": EXCEL}]},
        ("store_app", {"content-desc": "Navigate up"}, "store_results"),
        ("store_app_installed", {"text": "Open"}, "excel_welcome"),
        ("store_app_installed", {"content-desc": "Navigate up"}, "store_results"),
        ("excel_welcome", {"text": "Sign in"}, "excel_login"),
        {"from": "store_results", "on": {"kind": "press_back"}, "to": "store_home"},
        {"from": "store_app", "on": {"kind": "press_back"}, "to": "store_results"},
        {"from": "store_app_installed", "on": {"kind": "press_back"}, "to": "store_results"},
        {"from": "excel_login", "on": {"kind": "press_back"}, "to": "excel_welcome"},
        {"from": "*", "on": {"kind": "press_home"}, "to": "home", "when": not_inst},
        {"from": "*", "on": {"kind": "press_home"}, "to": "home_excel", "when": inst},
    ]
    return {
        "app_id": "excel",
        "screen_size": [W, H],
        "initial_packages": sorted(BASE_PACKAGES),
        "initial_screen": [{"screen": "home_excel", "when": inst}, {"screen": "home"}],
        "screens": screens,
        "transitions": transitions,
    }


# -- settings -----------------------------------------------------------------------------

SETTINGS_ROWS = [
    ("Network & internet", "Mobile, Wi-Fi, hotspot"),
    ("Connected devices", "Bluetooth, pairing"),
    ("Apps", "Recent apps, default apps"),
    ("Notifications", "Notification history, conversations"),
    ("Battery", "100%"),
    ("Storage", "38% used - 79.21 GB free"),
    ("Sound & vibration", "Volume, haptics, Do Not Disturb"),
    ("Display", "Dark theme, font size, brightness"),
    ("Wallpaper & style", "Colors, themed icons, app grid"),
    ("Accessibility", "Display, interaction, audio"),
    ("Security & privacy", "App security, device lock, permissions"),
    ("Location", "On - 4 apps have access to location"),
    ("System", "Languages, gestures, time, backup"),
    ("About phone", "Pixel 6"),
]


def _settings_row(title, summary):
    return E("Linear", kids=[tap(title, "android:id/title", h=100), T(summary, "android:id/summary", h=70)],
             h=190, pad=40)


def _settings_main(scrolled):
    rows = SETTINGS_ROWS[5:] if scrolled else SETTINGS_ROWS
    head = [] if scrolled else [T("Settings", f"{SETTINGS}:id/homepage_title", h=220),
                                tap("Search settings", f"{SETTINGS}:id/search_action_bar", h=150)]
    return page(SETTINGS, [
        gap(100),
        *head,
        E("Recycler", rid=f"{SETTINGS}:id/recycler_view", scrollable=True, h=2400,
          kids=[_settings_row(t, s) for t, s in rows]),
    ])


def _toolbar(title):
    return E("Linear", kids=[E("ImageButton", desc="Navigate up", clickable=True),
                             T(title, f"{SETTINGS}:id/collapsing_toolbar")], layout="h", h=200)


def _wifi(on):
    kids = [gap(100), _toolbar("Internet"),
            E("Linear", kids=[T("Wi-Fi", "android:id/title"),
                              E("Switch", "ON" if on else "OFF", "android:id/switch_widget", clickable=True,
                                checked=on)], layout="h", h=180, pad=40)]
    if on:
        kids += [tap(n, "android:id/title", h=150) for n in ("HomeNet", "Office-5G", "CoffeeShop Guest")]
        kids.append(tap("Add network", f"{SETTINGS}:id/add_network", h=150))
    else:
        kids.append(T("To see available networks, turn Wi-Fi on", "android:id/summary", h=150))
    return page(SETTINGS, kids)


def _display(dark):
    return page(SETTINGS, [
        gap(100), _toolbar("Display"),
        _settings_row("Brightness level", "42%"),
        E("Linear", kids=[T("Adaptive brightness", "android:id/title"),
                          E("Switch", "ON", "android:id/switch_widget", clickable=True, checked=True)],
          layout="h", h=180, pad=40),
        E("Linear", kids=[T("Dark theme", "android:id/title"),
                          E("Switch", "ON" if dark else "OFF", f"{SETTINGS}:id/dark_theme_switch", clickable=True,
                            checked=dark)], layout="h", h=180, pad=40),
        _settings_row("Screen timeout", "After 30 seconds of inactivity"),
        _settings_row("Auto-rotate screen", "Off"),
    ])


def _apps(with_candy):
    names = ["Calculator", "Calendar", "Candy Crush Saga", "Chrome", "Clock", "Contacts", "Files"]
    if not with_candy:
        names.remove("Candy Crush Saga")
    return page(SETTINGS, [gap(100), _toolbar("All apps"),
                           E("Recycler", rid=f"{SETTINGS}:id/apps_list", scrollable=True, h=2000,
                             kids=[tap(n, "android:id/title", h=170) for n in names])])


def _app_info():
    return page(SETTINGS, [
        gap(100), _toolbar("App info"),
        E("Image", desc="App icon", h=200),
        T("Candy Crush Saga", f"{SETTINGS}:id/entity_header_title", h=140),
        T("Installed", f"{SETTINGS}:id/entity_header_summary", h=100),
        E("Linear", kids=[E("Button", "Open", f"{SETTINGS}:id/button1", clickable=True),
                          E("Button", "Uninstall", f"{SETTINGS}:id/button2", clickable=True),
                          E("Button", "Force stop", f"{SETTINGS}:id/button3", clickable=True)],
          layout="h", h=200, pad=40),
        _settings_row("Notifications", "~1 notification per week"),
        _settings_row("Permissions", "No permissions requested"),
        _settings_row("Storage & cache", "412 MB used in internal storage"),
    ])


def _uninstall_dialog():
    installer = "com.google.android.packageinstaller"
    dialog = E("Frame", kids=[
        T("Candy Crush Saga", f"{installer}:id/alertTitle", h=150),
        T("Do you want to uninstall this app?", "android:id/message", h=160),
        E("Linear", kids=[E("Button", "Cancel", "android:id/button2", clickable=True),
                          E("Button", "OK", "android:id/button1", clickable=True)], layout="h", h=150),
    ], pad=40)
    return page(installer, [], extra_roots=[(installer, dialog, (60, 900, 1020, 1500))])


def _about():
    return page(SETTINGS, [
        gap(100), _toolbar("About phone"),
        _settings_row("Device name", "Pixel 6"),
        _settings_row("Phone number", "+1 650-555-0100"),
        _settings_row("Emergency information", "Info and contacts for emergencies"),
        _settings_row("Legal information", "Third-party licenses"),
        _settings_row("Android version", "14"),
        _settings_row("Build number", "UQ1A.240205.004"),
    ])


def settings_pack():
    act = "com.android.settings"
    screens = {
        "settings_main": (f"{act}.Settings", _settings_main(False), "#f6f6f6"),
        "settings_main_scrolled": (f"{act}.Settings", _settings_main(True), "#f6f6f6"),
        "wifi_off": (f"{act}.Settings$NetworkDashboardActivity", _wifi(False), "#ffffff"),
        "wifi_on": (f"{act}.Settings$NetworkDashboardActivity", _wifi(True), "#ffffff"),
        "display_dark": (f"{act}.Settings$DisplaySettingsActivity", _display(True), "#202124"),
        "display_light": (f"{act}.Settings$DisplaySettingsActivity", _display(False), "#ffffff"),
        "apps": (f"{act}.Settings$ManageApplicationsActivity", _apps(True), "#ffffff"),
        "apps_after": (f"{act}.Settings$ManageApplicationsActivity", _apps(False), "#ffffff"),
        "app_info": (f"{act}.applications.InstalledAppDetailsTop", _app_info(), "#ffffff"),
        "uninstall_confirm": ("com.android.packageinstaller.UninstallerActivity", _uninstall_dialog(), "#888888"),
        "about": (f"{act}.Settings$MyDeviceInfoActivity", _about(), "#ffffff"),
    }
    up = {"content-desc": "Navigate up"}
    inst, gone = {"installed": CANDY}, {"not_installed": CANDY}
    transitions = [
        ("settings_main", {"text": "Network & internet"}, "wifi_off"),
        ("settings_main", {"text": "Apps"}, "apps", inst),
        ("settings_main", {"text": "Apps"}, "apps_after", gone),
        ("settings_main", {"text": "Display"}, "display_dark"),
        {"from": "settings_main", "on": {"kind": "swipe", "direction": "up"}, "to": "settings_main_scrolled"},
        {"from": "settings_main_scrolled", "on": {"kind": "swipe", "direction": "down"}, "to": "settings_main"},
        ("settings_main_scrolled", {"text": "Display"}, "display_dark"),
        ("settings_main_scrolled", {"text": "About phone"}, "about"),
        ("wifi_off", {"resource-id": "android:id/switch_widget"}, "wifi_on"),
        ("wifi_on", {"resource-id": "android:id/switch_widget"}, "wifi_off"),
        ("display_dark", {"resource-id": f"{SETTINGS}:id/dark_theme_switch"}, "display_light"),
        ("display_light", {"resource-id": f"{SETTINGS}:id/dark_theme_switch"}, "display_dark"),
        ("apps", {"text": "Candy Crush Saga"}, "app_info"),
        ("app_info", {"text": "Uninstall"}, "uninstall_confirm"),
        ("uninstall_confirm", {"text": "Cancel"}, "app_info"),
        {"from": "uninstall_confirm", "on": {"kind": "click", "target": {"text": "OK"}}, "to": "apps_after",
         "effects": [{"uninstall": CANDY}]},
        ("app_info", up, "apps"),
    ]
    for sid in ("wifi_off", "wifi_on", "display_dark", "display_light", "apps", "apps_after"):
        transitions.append((sid, up, "settings_main"))
        transitions.append({"from": sid, "on": {"kind": "press_back"}, "to": "settings_main"})
    transitions += [
        ("about", up, "settings_main_scrolled"),
        {"from": "about", "on": {"kind": "press_back"}, "to": "settings_main_scrolled"},
        {"from": "app_info", "on": {"kind": "press_back"}, "to": "apps"},
        {"from": "uninstall_confirm", "on": {"kind": "press_back"}, "to": "app_info"},
    ]
    return {
        "app_id": "settings",
        "screen_size": [W, H],
        "initial_packages": sorted(BASE_PACKAGES + [CANDY]),
        "initial_screen": "settings_main",
        "screens": screens,
        "transitions": transitions,
    }


# -- shop -------------------------------------------------------------------------------

SONY = "Sony WH-1000XM5 Wireless Noise Cancelling Headphones"


def _shop_bar():
    return E("Linear", kids=[E("Image", desc="Best Buy", rid=f"{SHOP}:id/logo"),
                             tap("Search Best Buy", f"{SHOP}:id/search_bar"),
                             E("ImageButton", desc="Cart", rid=f"{SHOP}:id/cart_icon", clickable=True)],
             layout="h", h=170)


def _shop_home():
    def tile(name, price):
        return E("Linear", kids=[tap(name, f"{SHOP}:id/product_title", h=130), T(price, f"{SHOP}:id/price", h=90)],
                 h=240, pad=40)

    return page(SHOP, [
        gap(100), _shop_bar(),
        T("Deals of the Day", f"{SHOP}:id/section_title", h=160),
        tile(SONY, "$329.99"),
        tile("Apple 10.9-Inch iPad (10th Generation) Wi-Fi 64GB", "$349.99"),
        tile("Samsung 65\" Class S90C OLED 4K Smart TV", "$1,599.99"),
        tile("Nintendo Switch OLED Model", "$349.99"),
    ])


def _shop_search_box(text, focused):
    return E("Edit", text, f"{SHOP}:id/search_src_text", clickable=True, focused=focused)


def _shop_search():
    return page(SHOP, [
        gap(100),
        E("Linear", kids=[E("ImageButton", desc="Back", clickable=True),
                          _shop_search_box("What can we help you find?", True)], layout="h", h=170),
        T("Recent searches", f"{SHOP}:id/recent_title", h=140),
        tap("tv", f"{SHOP}:id/recent_query", h=130),
        tap("headphones", f"{SHOP}:id/recent_query", h=130),
    ])


def _shop_results():
    def result(name, price):
        return E("Linear", kids=[tap(name, f"{SHOP}:id/product_title", h=130), T(price, f"{SHOP}:id/price", h=90)],
                 h=240, pad=40)

    return page(SHOP, [
        gap(100),
        E("Linear", kids=[E("ImageButton", desc="Back", clickable=True), _shop_search_box("", False)],
          layout="h", h=170),
        E("Linear", kids=[tap("Filter", f"{SHOP}:id/filter"), tap("Sort", f"{SHOP}:id/sort")], layout="h", h=130),
        result("HP - 15.6\" Touch-Screen Laptop - Intel Core i5", "$549.99"),
        result("Lenovo - IdeaPad 3i 15.6\" Laptop", "$429.99"),
        result("ASUS - Vivobook 16\" Laptop", "$499.99"),
    ])


def _product():
    return page(SHOP, [
        gap(100), _shop_bar(),
        T(SONY, f"{SHOP}:id/pdp_title", h=200),
        T("$329.99", f"{SHOP}:id/pdp_price", h=120),
        T("4.7 (5,213 reviews)", f"{SHOP}:id/rating", h=100),
        E("Linear", kids=[tap("Pickup", f"{SHOP}:id/fulfillment", selected=True),
                          tap("Shipping", f"{SHOP}:id/fulfillment")], layout="h", h=160),
        E("Button", "Add to Cart", f"{SHOP}:id/add_to_cart_button", clickable=True, h=170),
    ])


def _added():
    sheet = E("Frame", kids=[
        T("Added to Cart", f"{SHOP}:id/sheet_title", h=160),
        T(SONY, f"{SHOP}:id/sheet_item", h=150),
        E("Button", "Go to Cart", f"{SHOP}:id/go_to_cart", clickable=True, h=160),
        E("Button", "Continue Shopping", f"{SHOP}:id/continue_shopping", clickable=True, h=160),
    ], pad=40)
    return page(SHOP, [gap(100), _shop_bar(), T(SONY, f"{SHOP}:id/pdp_title", h=200)],
                extra_roots=[(SHOP, sheet, (0, 1600, W, H))])


def cart_item(name, price):
    return E("Linear", rid=f"{SHOP}:id/cart_item", kids=[
        T(name, f"{SHOP}:id/cart_item_title", h=140),
        T(price, f"{SHOP}:id/cart_item_price", h=90),
        E("Linear", kids=[tap("Save for Later", f"{SHOP}:id/save_for_later"),
                          tap("Remove", f"{SHOP}:id/remove_button")], layout="h", h=110),
    ], h=360, pad=40)


def cart_screen(items, total):
    return page(SHOP, [
        gap(100),
        E("Linear", kids=[E("ImageButton", desc="Back", clickable=True), T("Cart", f"{SHOP}:id/toolbar_title")],
          layout="h", h=170),
        *[cart_item(n, p) for n, p in items],
        T("Order Summary", f"{SHOP}:id/summary_title", h=140),
        T(f"Total {total}", f"{SHOP}:id/summary_total", h=110),
        E("Button", "Checkout", f"{SHOP}:id/checkout_button", clickable=True, h=170),
    ])


def cart_empty_screen():
    return page(SHOP, [
        gap(100),
        E("Linear", kids=[E("ImageButton", desc="Back", clickable=True), T("Cart", f"{SHOP}:id/toolbar_title")],
          layout="h", h=170),
        E("Image", desc="Empty cart", rid=f"{SHOP}:id/empty_cart_image", h=400),
        T("Your cart is empty", f"{SHOP}:id/empty_cart_title", h=140),
        T("Sign in to see items you may have added from another device.", f"{SHOP}:id/empty_cart_body", h=160),
        E("Button", "Sign In", f"{SHOP}:id/sign_in", clickable=True, h=160),
        E("Button", "Continue Shopping", f"{SHOP}:id/continue_shopping", clickable=True, h=160),
    ])


def shop_pack():
    act = "com.bestbuy.android.activities"
    screens = {
        "shop_home": (f"{act}.home.HomeActivity", _shop_home(), "#ffffff"),
        "shop_search": (f"{act}.search.SearchActivity", _shop_search(), "#ffffff"),
        "shop_results": (f"{act}.search.SearchResultsActivity", _shop_results(), "#ffffff"),
        "product": (f"{act}.pdp.ProductDetailActivity", _product(), "#ffffff"),
        "added": (f"{act}.pdp.ProductDetailActivity", _added(), "#ffffff"),
        "cart": (f"{act}.cart.CartActivity", cart_screen([(SONY, "$329.99")], "$329.99"), "#ffffff"),
        "cart_empty": (f"{act}.cart.CartActivity", cart_empty_screen(), "#ffffff"),
    }
    back = {"content-desc": "Back"}
    cart = {"content-desc": "Cart"}
    transitions = [
        ("shop_home", {"text": "Search Best Buy"}, "shop_search"),
        ("shop_home", cart, "cart"),
        ("shop_home", {"text": SONY}, "product"),
        {"from": "shop_search", "on": {"kind": "type"}, "to": "shop_results",
         "effects": [{"carry_text": {"from": {"resource-id": f"{SHOP}:id/search_src_text"},
                                     "to": {"resource-id": f"{SHOP}:id/search_src_text"}}}]},
        ("shop_search", back, "shop_home"),
        ("shop_results", back, "shop_search"),
        ("product", {"text": "Add to Cart"}, "added"),
        ("product", cart, "cart"),
        ("added", {"text": "Go to Cart"}, "cart"),
        ("added", {"text": "Continue Shopping"}, "shop_home"),
        ("cart", {"text": "Remove"}, "cart_empty"),
        ("cart", back, "shop_home"),
        ("cart_empty", back, "shop_home"),
        ("cart_empty", {"text": "Continue Shopping"}, "shop_home"),
    ]
    for sid in ("shop_search", "shop_results", "product", "added", "cart", "cart_empty"):
        transitions.append({"from": sid, "on": {"kind": "press_back"}, "to": "shop_home"})
    return {
        "app_id": "shop",
        "screen_size": [W, H],
        "initial_packages": sorted(BASE_PACKAGES + [SHOP]),
        "initial_screen": "shop_home",
        "screens": screens,
        "transitions": transitions,
    }


# -- notes ------------------------------------------------------------------------------

def _notes_list(rows, empty=False):
    kids = [gap(100), T("Notes", f"{NOTES}:id/toolbar_title", h=200)]
    if empty:
        kids.append(T("No notes yet", f"{NOTES}:id/empty_text", h=160))
    for title, when in rows:
        kids.append(E("Linear", kids=[tap(title, f"{NOTES}:id/note_title", h=110),
                                      T(when, f"{NOTES}:id/note_date", h=70)], h=200, pad=40))
    fab = E("ImageButton", desc="New note", rid=f"{NOTES}:id/fab", clickable=True)
    return page(NOTES, kids, extra_roots=[(NOTES, fab, (860, 2160, 1020, 2320))])


def _notes_editor():
    return page(NOTES, [
        gap(100),
        E("Linear", kids=[E("ImageButton", desc="Back", clickable=True),
                          E("ImageButton", desc="Save", rid=f"{NOTES}:id/save", clickable=True)],
          layout="h", h=170),
        E("Edit", "Title", f"{NOTES}:id/title_input", clickable=True, focused=True, h=160),
        E("Edit", "Note", f"{NOTES}:id/body_input", clickable=True, h=900),
    ])


def _note_view():
    return page(NOTES, [
        gap(100),
        E("Linear", kids=[E("ImageButton", desc="Back", clickable=True),
                          E("ImageButton", desc="Delete", rid=f"{NOTES}:id/delete", clickable=True)],
          layout="h", h=170),
        T("Meeting notes", f"{NOTES}:id/view_title", h=160),
        T("Discuss Q3 roadmap and hiring plan", f"{NOTES}:id/view_body", h=300),
    ])


def _delete_dialog():
    dialog = E("Frame", kids=[
        T("Delete this note?", "android:id/message", h=180),
        E("Linear", kids=[E("Button", "Cancel", "android:id/button2", clickable=True),
                          E("Button", "Delete", "android:id/button1", clickable=True)], layout="h", h=150),
    ], pad=40)
    return page(NOTES, [gap(100), T("Meeting notes", f"{NOTES}:id/view_title", h=160)],
                extra_roots=[(NOTES, dialog, (60, 1000, 1020, 1400))])


def notes_pack():
    act = "com.example.notes"
    meeting = ("Meeting notes", "Updated yesterday")
    screens = {
        "notes_list": (f"{act}.NotesListActivity", _notes_list([meeting]), "#fffbe6"),
        "notes_list_new": (f"{act}.NotesListActivity", _notes_list([("Untitled", "Just now"), meeting]), "#fffbe6"),
        "notes_list_empty": (f"{act}.NotesListActivity", _notes_list([], empty=True), "#fffbe6"),
        "notes_editor": (f"{act}.EditNoteActivity", _notes_editor(), "#ffffff"),
        "note_view": (f"{act}.ViewNoteActivity", _note_view(), "#ffffff"),
        "delete_confirm": (f"{act}.ViewNoteActivity", _delete_dialog(), "#888888"),
    }
    back = {"content-desc": "Back"}
    transitions = [
        ("notes_list", {"content-desc": "New note"}, "notes_editor"),
        ("notes_list", {"text": "Meeting notes"}, "note_view"),
        ("notes_list_new", {"text": "Meeting notes"}, "note_view"),
        {"from": "notes_editor", "on": {"kind": "click", "target": {"content-desc": "Save"}}, "to": "notes_list_new",
         "effects": [{"carry_text": {"from": {"resource-id": f"{NOTES}:id/title_input"},
                                     "to": {"text": "Untitled"}}}]},
        ("notes_editor", back, "notes_list"),
        ("note_view", {"content-desc": "Delete"}, "delete_confirm"),
        ("note_view", back, "notes_list"),
        ("delete_confirm", {"text": "Cancel"}, "note_view"),
        ("delete_confirm", {"text": "Delete"}, "notes_list_empty"),
        {"from": "notes_editor", "on": {"kind": "press_back"}, "to": "notes_list"},
        {"from": "note_view", "on": {"kind": "press_back"}, "to": "notes_list"},
    ]
    return {
        "app_id": "notes",
        "screen_size": [W, H],
        "initial_packages": sorted(BASE_PACKAGES + [NOTES]),
        "initial_screen": "notes_list",
        "screens": screens,
        "transitions": transitions,
    }


PACKS = {"excel": excel_pack, "settings": settings_pack, "shop": shop_pack, "notes": notes_pack}


# -- selector resolution ---------------------------------------------------------------------

def find_by(tree, selector):
    for node in tree.nodes:
        if all(node.get(k) == v for k, v in selector.items()):
            return node
    raise KeyError(f"no node matches {selector!r}")


def resolve_pack(doc):
    """Turn selector-based transitions into the pack JSON format."""
    size = tuple(doc["screen_size"])
    trees = {sid: parse_vh(vh, size) for sid, (_, vh, _) in doc["screens"].items()}

    def xp(sid, sel):
        return xpath_of(trees[sid], find_by(trees[sid], sel))

    out_transitions = []
    for t in doc["transitions"]:
        if isinstance(t, tuple):
            src, sel, dst, *guard = t
            t = {"from": src, "on": {"kind": "click", "target": sel}, "to": dst}
            if guard:
                t["when"] = guard[0]
        t = dict(t)
        on = dict(t["on"])
        if "target" in on:
            on["xpath"] = xp(t["from"], on.pop("target"))
        t["on"] = on
        effects = []
        for eff in t.get("effects", []):
            (name, arg), = eff.items()
            if name == "carry_text":
                arg = {"from": xp(t["from"], arg["from"]), "to": xp(t["to"], arg["to"])}
            elif name == "set_text":
                arg = {"xpath": xp(t["to"], arg["target"]), "text": arg["text"]}
            effects.append({name: arg})
        if effects:
            t["effects"] = effects
        out_transitions.append(t)
    screens = {sid: {"activity": act, "vh": vh, "background": bg} for sid, (act, vh, bg) in doc["screens"].items()}
    return {**doc, "screens": screens, "transitions": out_transitions}
