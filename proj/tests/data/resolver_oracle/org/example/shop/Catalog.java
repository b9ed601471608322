package org.example.shop;

import java.util.HashMap;
import java.util.Map;

public class Catalog {
    private final Map<String, Item> items = new HashMap<>();
    private int version;

    public void register(Item item) {
        items.put(item.getName(), item); //= put => java.lang.Object java.util.Map.put(java.lang.Object, java.lang.Object) || getName => java.lang.String org.example.shop.Entity.getName()
        bump(); //= bump => void org.example.shop.Catalog.bump()
    }

    private void bump() {
        version++;
    }

    public Item find(String key) {
        Object found = items.get(key); //= get => java.lang.Object java.util.Map.get(java.lang.Object)
        return (Item) found;
    }

    public int parseVersion(String text) {
        return Integer.parseInt(text.trim()); //= parseInt => int java.lang.Integer.parseInt(java.lang.String) || trim => java.lang.String java.lang.String.trim()
    }

    public String hashLabel() {
        return toString() + hashCode(); //= toString => java.lang.String java.lang.Object.toString() || hashCode => int java.lang.Object.hashCode()
    }

    class Cursor {
        int position;

        void advance() {
            bump(); //= bump => void org.example.shop.Catalog.bump()
            position = position + size(); //= size => int org.example.shop.Catalog.size()
        }
    }

    public int size() {
        return items.size(); //= size => int java.util.Map.size()
    }
}
